#include "saci/harness/plot.hpp"

#include "saci/envs/registry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <stdexcept>

namespace saci::harness {

namespace {

// Latest avg100 at or before each grid step; `records` are in step order.
std::vector<double> step_hold(const std::vector<MetricsRecord>& records,
                              const std::vector<std::size_t>& grid)
{
    std::vector<double> out;
    out.reserve(grid.size());
    std::size_t k = 0;
    for (const auto g : grid) {
        while (k + 1 < records.size() && records[k + 1].step <= g) {
            ++k;
        }
        out.push_back(records[k].avg100);
    }
    return out;
}

std::vector<double> smooth(const std::vector<double>& xs, std::size_t window)
{
    std::vector<double> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const std::size_t lo = i + 1 >= window ? i + 1 - window : 0;
        double sum = 0.0;
        for (std::size_t j = lo; j <= i; ++j) {
            sum += xs[j];
        }
        out[i] = sum / static_cast<double>(i + 1 - lo);
    }
    return out;
}

} // namespace

std::vector<PlotRow> export_plot_data(const std::vector<std::vector<MetricsRecord>>& runs,
                                      std::size_t smoothing_window)
{
    if (runs.empty()) {
        throw std::invalid_argument("export_plot_data: at least one metrics file is required");
    }
    if (smoothing_window == 0) {
        throw std::invalid_argument("export_plot_data: smoothing window must be >= 1");
    }
    std::size_t coarsest = 0;
    std::size_t first = 0;
    std::size_t last = SIZE_MAX;
    for (std::size_t r = 0; r < runs.size(); ++r) {
        const auto& run = runs[r];
        if (run.empty()) {
            throw std::invalid_argument("export_plot_data: a metrics file has no rows");
        }
        for (std::size_t i = 1; i < run.size(); ++i) {
            if (run[i].step < run[i - 1].step) {
                throw std::invalid_argument("export_plot_data: steps must not decrease");
            }
        }
        if (run.size() < runs[coarsest].size()) {
            coarsest = r;
        }
        first = std::max(first, run.front().step);
        last = std::min(last, run.back().step);
    }
    std::vector<std::size_t> grid;
    for (const auto& rec : runs[coarsest]) {
        if (rec.step >= first && rec.step <= last && (grid.empty() || grid.back() != rec.step)) {
            grid.push_back(rec.step);
        }
    }
    std::vector<std::vector<double>> series;
    series.reserve(runs.size());
    for (const auto& run : runs) {
        series.push_back(smooth(step_hold(run, grid), smoothing_window));
    }
    std::vector<PlotRow> rows;
    rows.reserve(grid.size());
    const auto n = static_cast<double>(runs.size());
    for (std::size_t g = 0; g < grid.size(); ++g) {
        double sum = 0.0;
        for (const auto& s : series) {
            sum += s[g];
        }
        const double mean = sum / n;
        double ss = 0.0;
        for (const auto& s : series) {
            ss += (s[g] - mean) * (s[g] - mean);
        }
        rows.push_back({grid[g], mean, std::sqrt(ss / n)});
    }
    return rows;
}

std::vector<PlotRow> export_plot_data(const std::vector<std::string>& metrics_files,
                                      std::size_t smoothing_window)
{
    std::vector<std::vector<MetricsRecord>> runs;
    for (const auto& path : metrics_files) {
        runs.push_back(read_metrics_file(path));
    }
    return export_plot_data(runs, smoothing_window);
}

void write_plot_csv(std::ostream& out, const std::vector<PlotRow>& rows)
{
    out << "step,mean_avg100,std_avg100\n";
    for (const auto& r : rows) {
        out << r.step << ',' << envs::format_double(r.mean) << ',' << envs::format_double(r.std)
            << '\n';
    }
}

} // namespace saci::harness
