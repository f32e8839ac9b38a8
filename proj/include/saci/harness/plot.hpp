#pragma once

#include "saci/harness/metrics.hpp"

#include <iosfwd>
#include <vector>

namespace saci::harness {

struct PlotRow {
    std::size_t step = 0;
    double mean = 0.0;
    double std = 0.0;  // population standard deviation across runs

    bool operator==(const PlotRow&) const = default;
};

/// Aggregates avg100 across runs. Runs with different step grids are resampled onto the
/// coarsest one (the run with the fewest records), restricted to steps every run has
/// reached; each run contributes its latest value at or before a grid step. Each resampled
/// series is smoothed with a trailing mean over `smoothing_window` grid points (1: none).
std::vector<PlotRow> export_plot_data(const std::vector<std::vector<MetricsRecord>>& runs,
                                      std::size_t smoothing_window = 1);

std::vector<PlotRow> export_plot_data(const std::vector<std::string>& metrics_files,
                                      std::size_t smoothing_window = 1);

/// Header `step,mean_avg100,std_avg100`.
void write_plot_csv(std::ostream& out, const std::vector<PlotRow>& rows);

} // namespace saci::harness
