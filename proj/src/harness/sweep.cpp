#include "saci/harness/sweep.hpp"

#include "saci/harness/trainer.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;

namespace saci::harness {

using numcore::ConfigError;

std::vector<SweepAxis> named_grid(const std::string& name)
{
    if (name == "bomb-freq") {
        return {{"env.stop_prob", {"0.25", "0.5", "0.75"}}};
    }
    if (name == "stop-prob") {
        return {{"env.stop_prob", {"0.9", "0.7"}}};
    }
    if (name == "ablation") {
        return {{"saci.episodic_memory", {"true", "false"}}, {"saci.dual_alpha", {"true", "false"}}};
    }
    throw ConfigError("unknown sweep grid '" + name + "' (bomb-freq, stop-prob, ablation)");
}

namespace {

void check_token(const std::string& s, const char* what)
{
    if (s.empty() || s.find("__") != std::string::npos ||
        s.find_first_of("/\\=, \t") != std::string::npos) {
        throw ConfigError(std::string("sweep ") + what + " '" + s +
                          "' must be non-empty without '/', '=', ',', spaces or '__'");
    }
}

std::string coords_name(const Coordinates& coords)
{
    std::string out;
    for (const auto& [k, v] : coords) {
        if (!out.empty()) {
            out += "__";
        }
        out += k + "=" + v;
    }
    return out.empty() ? "all" : out;
}

} // namespace

SweepAxis parse_axis(const std::string& text)
{
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
        throw ConfigError("sweep axis '" + text + "' must look like key=v1,v2");
    }
    SweepAxis axis{text.substr(0, eq), {}};
    std::stringstream rest(text.substr(eq + 1));
    std::string v;
    while (std::getline(rest, v, ',')) {
        axis.values.push_back(v);
    }
    check_token(axis.key, "key");
    if (axis.values.empty()) {
        throw ConfigError("sweep axis '" + axis.key + "' has no values");
    }
    for (const auto& value : axis.values) {
        check_token(value, "value");
    }
    return axis;
}

std::string cell_name(const SweepCell& cell)
{
    std::string out;
    for (const auto& [k, v] : cell.coords) {
        out += k + "=" + v + "__";
    }
    return out + "seed=" + std::to_string(cell.seed);
}

SweepCell parse_cell_name(const std::string& name)
{
    SweepCell cell;
    std::size_t pos = 0;
    bool have_seed = false;
    while (pos <= name.size()) {
        auto end = name.find("__", pos);
        if (end == std::string::npos) {
            end = name.size();
        }
        const auto part = name.substr(pos, end - pos);
        const auto eq = part.find('=');
        if (eq == std::string::npos || have_seed) {
            throw ConfigError("malformed sweep cell name '" + name + "'");
        }
        const auto key = part.substr(0, eq);
        const auto value = part.substr(eq + 1);
        if (key == "seed") {
            std::size_t used = 0;
            try {
                cell.seed = std::stoull(value, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used == 0 || used != value.size()) {
                throw ConfigError("malformed seed in sweep cell name '" + name + "'");
            }
            have_seed = true;
        } else {
            cell.coords.emplace_back(key, value);
        }
        pos = end + 2;
    }
    if (!have_seed) {
        throw ConfigError("sweep cell name '" + name + "' has no seed");
    }
    return cell;
}

std::vector<SweepCell> sweep_cells(const std::vector<SweepAxis>& axes,
                                   const std::vector<std::uint64_t>& seeds)
{
    if (seeds.empty()) {
        throw ConfigError("sweep needs at least one seed");
    }
    std::vector<Coordinates> combos{{}};
    for (const auto& axis : axes) {
        check_token(axis.key, "key");
        if (axis.values.empty()) {
            throw ConfigError("sweep axis '" + axis.key + "' has no values");
        }
        std::vector<Coordinates> next;
        for (const auto& c : combos) {
            for (const auto& v : axis.values) {
                check_token(v, "value");
                auto e = c;
                e.emplace_back(axis.key, v);
                next.push_back(std::move(e));
            }
        }
        combos = std::move(next);
    }
    std::vector<SweepCell> cells;
    for (const auto& c : combos) {
        for (const auto s : seeds) {
            cells.push_back({c, s});
        }
    }
    return cells;
}

SweepResult run_sweep(const TrainConfig& base, const std::vector<SweepAxis>& axes,
                      const std::vector<std::uint64_t>& seeds, const SweepOptions& options)
{
    if (options.out_dir.empty()) {
        throw ConfigError("sweep needs an output directory");
    }
    SweepResult result;
    result.cells = sweep_cells(axes, seeds);
    const fs::path root(options.out_dir);
    fs::create_directories(root / "cells");

    // configs are built up front so a bad axis fails before any training
    std::vector<TrainConfig> configs;
    for (const auto& cell : result.cells) {
        TrainConfig cfg = base;
        for (const auto& [k, v] : cell.coords) {
            apply_override(cfg, k + "=" + v);
        }
        cfg.seed = cell.seed;
        const auto stem = root / "cells" / cell_name(cell);
        cfg.metrics = stem.string() + ".csv";
        cfg.save = options.keep_checkpoints ? stem.string() + ".ckpt" : std::string();
        validate(cfg);
        configs.push_back(std::move(cfg));
    }

    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> done{0};
    std::atomic<bool> stop{false};
    std::exception_ptr error;
    std::mutex mutex;
    const auto worker = [&] {
        for (;;) {
            const std::size_t i = next++;
            if (i >= configs.size() || stop) {
                return;
            }
            try {
                Trainer trainer(configs[i]);
                trainer.run();
            } catch (...) {
                std::lock_guard lock(mutex);
                if (!error) {
                    error = std::current_exception();
                }
                stop = true;
                return;
            }
            const std::size_t d = ++done;
            if (options.on_cell_done) {
                std::lock_guard lock(mutex);
                options.on_cell_done(result.cells[i], d, configs.size());
            }
        }
    };
    const std::size_t n_workers = std::max<std::size_t>(1, std::min(options.workers, configs.size()));
    std::vector<std::thread> threads;
    for (std::size_t w = 1; w < n_workers; ++w) {
        threads.emplace_back(worker);
    }
    worker();
    for (auto& t : threads) {
        t.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }

    for (std::size_t i = 0; i < result.cells.size(); i += seeds.size()) {
        SweepGroup g;
        g.coords = result.cells[i].coords;
        std::vector<std::vector<MetricsRecord>> runs;
        for (std::size_t s = 0; s < seeds.size(); ++s) {
            g.metrics_files.push_back(configs[i + s].metrics);
            runs.push_back(read_metrics_file(configs[i + s].metrics));
            g.final_avg100.push_back(runs.back().empty() ? 0.0 : runs.back().back().avg100);
        }
        double sum = 0.0;
        for (const auto x : g.final_avg100) {
            sum += x;
        }
        g.final_mean = sum / static_cast<double>(g.final_avg100.size());
        double ss = 0.0;
        for (const auto x : g.final_avg100) {
            ss += (x - g.final_mean) * (x - g.final_mean);
        }
        g.final_std = std::sqrt(ss / static_cast<double>(g.final_avg100.size()));
        bool all_nonempty = true;
        for (const auto& r : runs) {
            all_nonempty = all_nonempty && !r.empty();
        }
        if (all_nonempty) {
            g.curve = export_plot_data(runs, options.smoothing_window);
        }
        std::ofstream plot(root / (coords_name(g.coords) + ".plot.csv"));
        write_plot_csv(plot, g.curve);
        result.groups.push_back(std::move(g));
    }
    std::ofstream matrix(root / "matrix.csv");
    write_sweep_matrix(matrix, axes, result);
    if (!matrix) {
        throw std::runtime_error("cannot write " + (root / "matrix.csv").string());
    }
    return result;
}

void write_sweep_matrix(std::ostream& out, const std::vector<SweepAxis>& axes,
                        const SweepResult& result)
{
    for (const auto& a : axes) {
        out << a.key << ',';
    }
    out << "seeds,final_avg100_mean,final_avg100_std\n";
    for (const auto& g : result.groups) {
        for (const auto& [k, v] : g.coords) {
            out << v << ',';
        }
        out << g.final_avg100.size() << ',' << envs::format_double(g.final_mean) << ','
            << envs::format_double(g.final_std) << '\n';
    }
}

} // namespace saci::harness
