#pragma once

#include "saci/envs/env.hpp"

#include <array>
#include <deque>
#include <iosfwd>
#include <string>
#include <vector>

namespace saci::harness {

/// Causes tallied cumulatively in the metrics stream (every cause except running).
inline constexpr std::array<envs::Cause, 6> kTalliedCauses{
    envs::Cause::landed, envs::Cause::crashed, envs::Cause::hit_bomb,
    envs::Cause::fell,   envs::Cause::finished, envs::Cause::timeout};

struct MetricsRecord {
    std::size_t step = 0;  // environment steps so far, including this episode
    std::size_t episode = 0;
    double episode_reward_raw = 0.0;
    double avg100 = 0.0;
    double alpha_r = 0.0;
    double alpha_i = 0.0;
    // per-episode means over the gradient steps taken
    double loss_q_r = 0.0;
    double loss_q_i = 0.0;
    double loss_pi = 0.0;
    double loss_alpha_r = 0.0;
    double loss_alpha_i = 0.0;
    std::size_t fill_r = 0;
    std::size_t fill_i = 0;
    envs::Cause cause = envs::Cause::running;
    envs::TrialKind trial_kind = envs::TrialKind::go;
    std::array<std::size_t, kTalliedCauses.size()> cause_counts{};

    bool operator==(const MetricsRecord&) const = default;
};

/// Mean of the last min(window, n) values, summed oldest first.
double trailing_mean(const std::vector<double>& values, std::size_t window = 100);

class Avg100 {
public:
    double push(double episode_reward);
    double value() const;
    std::size_t count() const { return window_.size(); }

private:
    std::deque<double> window_;
};

std::string metrics_header();
void write_metrics_header(std::ostream& out);
void write_metrics_row(std::ostream& out, const MetricsRecord& rec);

/// Throws std::runtime_error naming the line on malformed input.
std::vector<MetricsRecord> read_metrics(std::istream& in);
std::vector<MetricsRecord> read_metrics_file(const std::string& path);

} // namespace saci::harness
