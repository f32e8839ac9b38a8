#include "saci/bridge/remote_env.hpp"
#include "saci/harness/sweep.hpp"
#include "saci/harness/trainer.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace saci;

namespace {

constexpr int kUsage = 1;
constexpr int kRuntime = 2;
constexpr int kProtocol = 3;

struct CommonOptions {
    std::string config;
    std::string preset;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string load;
    std::string algo;
    std::string env;
    std::string out;
    std::vector<std::string> overrides;
};

struct RemoteOptions {
    std::string connect;  // host:port
    std::string spawn;    // command line
    double timeout_s = 30.0;
};

void add_common(CLI::App* cmd, CommonOptions& o)
{
    cmd->add_option("--config", o.config, "Config file (key = value with [section] headers)");
    cmd->add_option("--preset", o.preset, "Named experiment preset");
    cmd->add_option("--seed", o.seed, "Master seed")->each([&o](const std::string&) {
        o.seed_set = true;
    });
    cmd->add_option("--load", o.load, "Checkpoint to start from");
    cmd->add_option("--algo", o.algo, "sac or saci");
    cmd->add_option("--env", o.env, "stopgo, lander or runner");
    cmd->add_option("--out", o.out, "Output directory");
    cmd->add_option("--set", o.overrides, "Override, e.g. agent.lr=1e-3");
}

void add_remote(CLI::App* cmd, RemoteOptions& r)
{
    cmd->add_option("--connect", r.connect, "Use a bridge server at host:port as the environment");
    cmd->add_option("--spawn", r.spawn, "Run a bridge server command on standard streams");
    cmd->add_option("--timeout", r.timeout_s, "Bridge reply timeout in seconds");
}

harness::TrainConfig resolve(const CommonOptions& o)
{
    harness::TrainConfig cfg;
    if (!o.preset.empty()) {
        cfg = harness::preset(o.preset);
    }
    if (!o.config.empty()) {
        cfg = harness::load_config_file(o.config, cfg);
    }
    if (o.seed_set) {
        cfg.seed = o.seed;
    }
    if (!o.load.empty()) {
        cfg.load = o.load;
    }
    if (!o.algo.empty()) {
        harness::apply_override(cfg, "run.algo=" + o.algo);
    }
    if (!o.env.empty()) {
        cfg.env = o.env;
    }
    for (const auto& s : o.overrides) {
        harness::apply_override(cfg, s);
    }
    harness::validate(cfg);
    return cfg;
}

std::vector<std::string> split_words(const std::string& text)
{
    std::istringstream in(text);
    std::vector<std::string> words;
    std::string w;
    while (in >> w) {
        words.push_back(w);
    }
    return words;
}

std::unique_ptr<envs::Environment> remote_env(const RemoteOptions& r)
{
    if (r.connect.empty() && r.spawn.empty()) {
        return nullptr;
    }
    if (!r.connect.empty() && !r.spawn.empty()) {
        throw numcore::ConfigError("use either --connect or --spawn, not both");
    }
    const auto timeout = bridge::Millis{static_cast<long long>(r.timeout_s * 1000.0)};
    if (!r.spawn.empty()) {
        return std::make_unique<bridge::RemoteEnv>(bridge::spawn_process(split_words(r.spawn)),
                                                   timeout);
    }
    const auto colon = r.connect.rfind(':');
    if (colon == std::string::npos) {
        throw numcore::ConfigError("--connect expects host:port");
    }
    int port = 0;
    try {
        port = std::stoi(r.connect.substr(colon + 1));
    } catch (const std::exception&) {
        port = -1;
    }
    if (port <= 0 || port > 65535) {
        throw numcore::ConfigError("--connect has an invalid port");
    }
    return std::make_unique<bridge::RemoteEnv>(
        bridge::tcp_connect(r.connect.substr(0, colon), static_cast<std::uint16_t>(port), timeout),
        timeout);
}

int cmd_train(const CommonOptions& o, const RemoteOptions& r, bool quiet)
{
    auto cfg = resolve(o);
    if (!o.out.empty()) {
        fs::create_directories(o.out);
        if (cfg.metrics.empty()) {
            cfg.metrics = (fs::path(o.out) / "metrics.csv").string();
        }
        const auto name = cfg.save.empty() ? std::string("checkpoint.ckpt")
                                           : fs::path(cfg.save).filename().string();
        cfg.save = (fs::path(o.out) / name).string();
    }
    harness::Trainer trainer(cfg, remote_env(r));
    trainer.run([&](const harness::MetricsRecord& rec) {
        if (!quiet && (rec.episode % 10 == 0)) {
            std::printf("episode %zu step %zu reward %.2f avg100 %.2f alpha_r %.4f alpha_i %.4f "
                        "cause %s\n",
                        rec.episode, rec.step, rec.episode_reward_raw, rec.avg100, rec.alpha_r,
                        rec.alpha_i, std::string(envs::to_string(rec.cause)).c_str());
            std::fflush(stdout);
        }
    });
    return 0;
}

int cmd_eval(const CommonOptions& o, const RemoteOptions& r, std::size_t episodes)
{
    if (o.load.empty()) {
        throw numcore::ConfigError("eval needs --load");
    }
    const auto ckpt = harness::load_checkpoint(o.load);
    auto cfg = harness::parse_config(ckpt.config_text);
    if (!o.config.empty()) {
        cfg = harness::load_config_file(o.config, cfg);
    }
    if (!o.env.empty()) {
        cfg.env = o.env;
    }
    for (const auto& s : o.overrides) {
        harness::apply_override(cfg, s);
    }
    auto env = remote_env(r);
    if (!env) {
        env = envs::make_env(cfg.env, cfg.env_options());
    }
    const auto s = harness::evaluate(ckpt, *env, episodes, o.seed_set ? o.seed : cfg.seed);
    std::printf("episodes %zu\nmean %.4f\nstd %.4f\nsuccess_rate %.4f\n", s.episodes, s.mean,
                s.std, s.success_rate);
    std::printf("go_episodes %zu\nmean_go %.4f\nstop_episodes %zu\nmean_stop %.4f\n",
                s.go_episodes, s.mean_go, s.stop_episodes, s.mean_stop);
    for (std::size_t k = 0; k < harness::kTalliedCauses.size(); ++k) {
        std::printf("cause_%s %zu\n",
                    std::string(envs::to_string(harness::kTalliedCauses[k])).c_str(),
                    s.cause_counts[k]);
    }
    return 0;
}

struct SweepArgs {
    std::string grid;
    std::vector<std::string> axes;
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    std::size_t jobs = 1;
    std::size_t smoothing = 1;
    bool keep_checkpoints = false;
};

int cmd_sweep(const CommonOptions& o, const SweepArgs& a, bool quiet)
{
    if (o.out.empty()) {
        throw numcore::ConfigError("sweep needs --out");
    }
    const auto cfg = resolve(o);
    std::vector<harness::SweepAxis> axes;
    if (!a.grid.empty()) {
        axes = harness::named_grid(a.grid);
    }
    for (const auto& text : a.axes) {
        axes.push_back(harness::parse_axis(text));
    }
    harness::SweepOptions opts;
    opts.out_dir = o.out;
    opts.workers = a.jobs;
    opts.smoothing_window = a.smoothing;
    opts.keep_checkpoints = a.keep_checkpoints;
    if (!quiet) {
        opts.on_cell_done = [](const harness::SweepCell& cell, std::size_t done, std::size_t total) {
            std::printf("cell %zu/%zu %s\n", done, total, harness::cell_name(cell).c_str());
            std::fflush(stdout);
        };
    }
    const auto result = harness::run_sweep(cfg, axes, a.seeds, opts);
    harness::write_sweep_matrix(std::cout, axes, result);
    return 0;
}

int cmd_export_plot(const std::vector<std::string>& files, std::size_t smoothing,
                    const std::string& out)
{
    const auto rows = harness::export_plot_data(files, smoothing);
    if (out.empty()) {
        harness::write_plot_csv(std::cout, rows);
        return 0;
    }
    std::ofstream f(out);
    harness::write_plot_csv(f, rows);
    if (!f) {
        throw std::runtime_error("cannot write " + out);
    }
    return 0;
}

struct ServeArgs {
    int port = -1;  // negative: standard streams
    std::string host = "127.0.0.1";
    bool once = false;
};

int cmd_serve(const CommonOptions& o, const ServeArgs& a)
{
    const auto cfg = resolve(o);
    auto env = envs::make_env(cfg.env, cfg.env_options());
    if (a.port < 0) {
        bridge::FdTransport stdio(0, 1, false);
        bridge::serve_env(*env, stdio);
        return 0;
    }
    if (a.port > 65535) {
        throw numcore::ConfigError("--port must lie in [0, 65535]");
    }
    bridge::TcpListener listener(static_cast<std::uint16_t>(a.port), a.host);
    std::fprintf(stderr, "listening on %s:%u\n", a.host.c_str(), listener.port());
    do {
        auto client = listener.accept();
        try {
            bridge::serve_env(*env, *client);
        } catch (const bridge::TransportError& e) {
            std::fprintf(stderr, "client dropped: %s\n", e.what());
        }
    } while (!a.once);
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"SAC and SAC-I training harness"};
    app.require_subcommand(1);

    CommonOptions train_opts;
    RemoteOptions train_remote;
    bool quiet = false;
    auto* train = app.add_subcommand("train", "Train an agent");
    add_common(train, train_opts);
    add_remote(train, train_remote);
    train->add_flag("--quiet", quiet, "No progress lines");

    CommonOptions eval_opts;
    RemoteOptions eval_remote;
    std::size_t eval_episodes = 100;
    auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint with the deterministic policy");
    add_common(eval, eval_opts);
    add_remote(eval, eval_remote);
    eval->add_option("--episodes", eval_episodes, "Episodes to run");

    CommonOptions sweep_opts;
    SweepArgs sweep_args;
    auto* sweep = app.add_subcommand("sweep", "Train a grid of configs over several seeds");
    add_common(sweep, sweep_opts);
    sweep->add_option("--grid", sweep_args.grid, "bomb-freq, stop-prob or ablation");
    sweep->add_option("--axis", sweep_args.axes, "Extra axis, e.g. env.stop_prob=0.25,0.5");
    sweep->add_option("--seeds", sweep_args.seeds, "Seeds")->delimiter(',');
    sweep->add_option("--jobs", sweep_args.jobs, "Cells trained in parallel");
    sweep->add_option("--smooth", sweep_args.smoothing, "Trailing smoothing window");
    sweep->add_flag("--keep-checkpoints", sweep_args.keep_checkpoints, "Save one checkpoint per cell");
    sweep->add_flag("--quiet", quiet, "No progress lines");

    std::vector<std::string> plot_files;
    std::size_t plot_smoothing = 1;
    std::string plot_out;
    auto* plot = app.add_subcommand("export-plot", "Mean and std of avg100 across metrics files");
    plot->add_option("files", plot_files, "Metrics files")->required();
    plot->add_option("--smooth", plot_smoothing, "Trailing smoothing window");
    plot->add_option("--out", plot_out, "Output file (default: standard output)");

    CommonOptions serve_opts;
    ServeArgs serve_args;
    auto* serve = app.add_subcommand("serve-env", "Serve a built-in environment over the bridge");
    add_common(serve, serve_opts);
    serve->add_option("--port", serve_args.port, "TCP port (0 picks one); default standard streams");
    serve->add_option("--host", serve_args.host, "Listen address");
    serve->add_flag("--once", serve_args.once, "Exit after the first client");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kUsage;
    }
    try {
        if (train->parsed()) {
            return cmd_train(train_opts, train_remote, quiet);
        }
        if (eval->parsed()) {
            return cmd_eval(eval_opts, eval_remote, eval_episodes);
        }
        if (sweep->parsed()) {
            return cmd_sweep(sweep_opts, sweep_args, quiet);
        }
        if (plot->parsed()) {
            return cmd_export_plot(plot_files, plot_smoothing, plot_out);
        }
        if (serve->parsed()) {
            return cmd_serve(serve_opts, serve_args);
        }
    } catch (const numcore::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const bridge::ProtocolError& e) {
        std::cerr << "protocol error: " << e.what() << '\n';
        return kProtocol;
    } catch (const bridge::TransportError& e) {
        std::cerr << "protocol error: " << e.what() << '\n';
        return kProtocol;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntime;
    }
    return kUsage;
}
