#include "saci/harness/metrics.hpp"

#include "saci/envs/registry.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace saci::harness {

double trailing_mean(const std::vector<double>& values, std::size_t window)
{
    if (values.empty()) {
        return 0.0;
    }
    const std::size_t n = std::min(window, values.size());
    double sum = 0.0;
    for (std::size_t i = values.size() - n; i < values.size(); ++i) {
        sum += values[i];
    }
    return sum / static_cast<double>(n);
}

double Avg100::push(double episode_reward)
{
    window_.push_back(episode_reward);
    if (window_.size() > 100) {
        window_.pop_front();
    }
    return value();
}

double Avg100::value() const
{
    if (window_.empty()) {
        return 0.0;
    }
    double sum = 0.0;
    for (double r : window_) {
        sum += r;
    }
    return sum / static_cast<double>(window_.size());
}

std::string metrics_header()
{
    std::string h = "step,episode,episode_reward_raw,avg100,alpha_r,alpha_i,loss_q_r,loss_q_i,"
                    "loss_pi,loss_alpha_r,loss_alpha_i,fill_r,fill_i,cause,trial_kind";
    for (auto c : kTalliedCauses) {
        h += ",count_";
        h += envs::to_string(c);
    }
    return h;
}

void write_metrics_header(std::ostream& out)
{
    out << metrics_header() << '\n';
}

void write_metrics_row(std::ostream& out, const MetricsRecord& r)
{
    using envs::format_double;
    out << r.step << ',' << r.episode << ',' << format_double(r.episode_reward_raw) << ','
        << format_double(r.avg100) << ',' << format_double(r.alpha_r) << ','
        << format_double(r.alpha_i) << ',' << format_double(r.loss_q_r) << ','
        << format_double(r.loss_q_i) << ',' << format_double(r.loss_pi) << ','
        << format_double(r.loss_alpha_r) << ',' << format_double(r.loss_alpha_i) << ','
        << r.fill_r << ',' << r.fill_i << ',' << envs::to_string(r.cause) << ','
        << envs::to_string(r.trial_kind);
    for (auto n : r.cause_counts) {
        out << ',' << n;
    }
    out << '\n';
}

namespace {

template <typename T>
T parse_number(const std::string& s, std::size_t line)
{
    T v{};
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw std::runtime_error("metrics line " + std::to_string(line) + ": bad number '" + s +
                                 "'");
    }
    return v;
}

} // namespace

std::vector<MetricsRecord> read_metrics(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || line != metrics_header()) {
        throw std::runtime_error("metrics: missing or unexpected header");
    }
    std::vector<MetricsRecord> out;
    std::size_t line_no = 1;
    constexpr std::size_t kColumns = 15 + kTalliedCauses.size();
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            cells.push_back(cell);
        }
        if (cells.size() != kColumns) {
            throw std::runtime_error("metrics line " + std::to_string(line_no) + ": expected " +
                                     std::to_string(kColumns) + " columns");
        }
        MetricsRecord r;
        std::size_t i = 0;
        r.step = parse_number<std::size_t>(cells[i++], line_no);
        r.episode = parse_number<std::size_t>(cells[i++], line_no);
        for (double* d : {&r.episode_reward_raw, &r.avg100, &r.alpha_r, &r.alpha_i, &r.loss_q_r,
                          &r.loss_q_i, &r.loss_pi, &r.loss_alpha_r, &r.loss_alpha_i}) {
            *d = parse_number<double>(cells[i++], line_no);
        }
        r.fill_r = parse_number<std::size_t>(cells[i++], line_no);
        r.fill_i = parse_number<std::size_t>(cells[i++], line_no);
        try {
            r.cause = envs::cause_from_string(cells[i++]);
            r.trial_kind = envs::trial_kind_from_string(cells[i++]);
        } catch (const std::exception& e) {
            throw std::runtime_error("metrics line " + std::to_string(line_no) + ": " + e.what());
        }
        for (auto& n : r.cause_counts) {
            n = parse_number<std::size_t>(cells[i++], line_no);
        }
        out.push_back(r);
    }
    return out;
}

std::vector<MetricsRecord> read_metrics_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot read metrics file '" + path + "'");
    }
    return read_metrics(in);
}

} // namespace saci::harness
