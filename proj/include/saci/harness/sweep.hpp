#pragma once

#include "saci/harness/config.hpp"
#include "saci/harness/plot.hpp"

#include <functional>
#include <utility>

namespace saci::harness {

/// One swept config key (as accepted by apply_override) and its values.
struct SweepAxis {
    std::string key;
    std::vector<std::string> values;
};

/// Named grids: "bomb-freq" (env.stop_prob 0.25/0.5/0.75), "stop-prob" (0.9/0.7) and
/// "ablation" (episodic_memory x dual_alpha).
std::vector<SweepAxis> named_grid(const std::string& name);

/// Parses `key=v1,v2,...`.
SweepAxis parse_axis(const std::string& text);

using Coordinates = std::vector<std::pair<std::string, std::string>>;

struct SweepCell {
    Coordinates coords;
    std::uint64_t seed = 0;

    bool operator==(const SweepCell&) const = default;
};

/// `key=value__key=value__seed=N`; usable as a file stem.
std::string cell_name(const SweepCell& cell);
SweepCell parse_cell_name(const std::string& name);

/// Cartesian product of the axes, seeds innermost.
std::vector<SweepCell> sweep_cells(const std::vector<SweepAxis>& axes,
                                   const std::vector<std::uint64_t>& seeds);

struct SweepGroup {
    Coordinates coords;
    std::vector<std::string> metrics_files;
    std::vector<double> final_avg100;  // one per seed
    double final_mean = 0.0;
    double final_std = 0.0;
    std::vector<PlotRow> curve;
};

struct SweepResult {
    std::vector<SweepCell> cells;
    std::vector<SweepGroup> groups;  // one per coordinate combination, in axis order
};

struct SweepOptions {
    std::string out_dir;
    std::size_t workers = 1;
    std::size_t smoothing_window = 1;
    bool keep_checkpoints = false;
    std::function<void(const SweepCell&, std::size_t done, std::size_t total)> on_cell_done;
};

/// Trains every cell independently, writing `<out_dir>/cells/<cell>.csv`, then aggregates
/// per coordinate combination into `<out_dir>/matrix.csv` and `<out_dir>/<group>.plot.csv`.
/// The first failing cell's exception is rethrown after the remaining workers stop.
SweepResult run_sweep(const TrainConfig& base, const std::vector<SweepAxis>& axes,
                      const std::vector<std::uint64_t>& seeds, const SweepOptions& options);

/// Header: axis keys, seeds, final_avg100_mean, final_avg100_std.
void write_sweep_matrix(std::ostream& out, const std::vector<SweepAxis>& axes,
                        const SweepResult& result);

} // namespace saci::harness
