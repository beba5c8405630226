// Command-line front end: train, sweep, adder-mult, fault-sim, eval, streams.
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "nanoesn/driver.hpp"
#include "nanoesn/experiment.hpp"
#include "nanoesn/io.hpp"
#include "nanoesn/teacher.hpp"

using namespace nanoesn;

namespace {

struct Overrides {
    std::string config;
    std::vector<std::string> set;
    std::uint64_t master_seed = 0;
    bool have_seed = false;
    int trials = 0;
    unsigned threads = 0;
    bool no_noise = false;
};

void add_common(CLI::App* cmd, Overrides& o)
{
    cmd->add_option("-c,--config", o.config, "experiment JSON config");
    cmd->add_option("-s,--set", o.set, "override a sweep-axis parameter, e.g. --set lambda=0.1");
    cmd->add_option_function<std::uint64_t>("--master-seed", [&o](const std::uint64_t& s) {
        o.master_seed = s;
        o.have_seed = true;
    }, "master seed");
    cmd->add_option("--trials", o.trials, "trials per cell");
    cmd->add_option("-j,--threads", o.threads, "worker threads (0 = all cores)");
    cmd->add_flag("--no-noise", o.no_noise, "disable temporal weight variation");
}

ExperimentConfig resolve(const Overrides& o)
{
    ExperimentConfig cfg = o.config.empty() ? experiment_config_from_json(nlohmann::json::object())
                                            : load_experiment_config(o.config);
    for (const std::string& kv : o.set) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("--set expects name=value, got '" + kv + "'");
        apply_axis(cfg.setup, kv.substr(0, eq), std::stod(kv.substr(eq + 1)));
    }
    if (o.no_noise)
        cfg.setup.variation.reset();
    if (o.have_seed)
        cfg.master_seed = o.master_seed;
    if (o.trials > 0)
        cfg.trials = o.trials;
    cfg.setup.network.validate();
    cfg.setup.task.validate();
    return cfg;
}

std::ostream& open_out(const std::string& path, std::ofstream& file)
{
    if (path.empty() || path == "-")
        return std::cout;
    file.open(path, std::ios::binary);
    if (!file)
        throw std::runtime_error("cannot write '" + path + "'");
    return file;
}

int cmd_train(const Overrides& o, const std::string& out, const std::string& streams_out)
{
    const ExperimentConfig cfg = resolve(o);
    const TrialSetup setup = seed_trial(cfg.setup, cfg.master_seed);
    const TrialOutcome outcome = run_trial_detailed(setup);
    std::cerr << "tr=" << format_number(outcome.metrics.tr) << " gr=" << format_number(outcome.metrics.gr)
              << '\n';
    std::ofstream f;
    open_out(out, f) << network_to_json(outcome.network, std::span(&outcome.readout, 1)) << '\n';
    if (!streams_out.empty()) {
        std::ofstream s(streams_out);
        write_streams_csv(s, generate_streams(setup.task));
    }
    return 0;
}

GridAxis parse_grid_axis(const std::string& spec)
{
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq + 1 == spec.size())
        throw std::invalid_argument("--grid expects name=v1,v2,..., got '" + spec + "'");
    GridAxis axis{spec.substr(0, eq), {}};
    std::stringstream values(spec.substr(eq + 1));
    for (std::string item; std::getline(values, item, ',');)
        axis.values.push_back(std::stod(item));
    return axis;
}

int cmd_sweep(const Overrides& o, const std::vector<std::string>& grid, const std::string& out)
{
    ExperimentConfig cfg = resolve(o);
    if (!grid.empty()) {
        cfg.grid.clear();
        for (const std::string& spec : grid)
            cfg.grid.push_back(parse_grid_axis(spec));
    }
    if (cfg.grid.empty())
        throw std::invalid_argument("sweep: the config has no \"grid\"");
    const auto results = sweep(cfg.setup, cfg.grid, cfg.trials, cfg.master_seed, o.threads);
    std::ofstream f;
    write_sweep_csv(open_out(out, f), results);
    return 0;
}

int cmd_adder_mult(Overrides o, const std::string& out)
{
    ExperimentConfig cfg = resolve(o);
    TrialSetup setup = cfg.setup;
    if (o.config.empty()) {
        setup = adder_multiplier_setup();
        if (o.no_noise)
            setup.variation.reset();
        for (const std::string& kv : o.set) {
            const auto eq = kv.find('=');
            apply_axis(setup, kv.substr(0, eq), std::stod(kv.substr(eq + 1)));
        }
    }
    setup.task.kind = TaskKind::AdderMultiplier2;
    const SweepResult r = run_adder_multiplier(setup, cfg.trials, cfg.master_seed, o.threads);
    std::ofstream f;
    std::ostream& os = open_out(out, f);
    write_sweep_csv_header(os);
    write_sweep_csv_row(os, r);
    return 0;
}

int cmd_fault_sim(const Overrides& o, const std::string& out)
{
    const ExperimentConfig cfg = resolve(o);
    RecoveryConfig rc = default_recovery_config();
    rc.network = cfg.setup.network;
    rc.readout = cfg.setup.readout;
    rc.length = cfg.setup.task.length;
    rc.washout = cfg.setup.washout;
    rc.variation = cfg.setup.variation;
    rc.t_fail = cfg.fault.t_fail;
    rc.aux_task = cfg.fault.aux_task;
    rc.aux_inputs = cfg.fault.aux_k;
    rc.debounce = cfg.fault.debounce;
    rc.master_seed = o.have_seed ? cfg.master_seed : cfg.fault.seed;
    std::vector<RecoveryStats> all;
    for (int m : cfg.fault.m) {
        all.push_back(run_recovery_experiment(rc, m, cfg.fault.repeats, o.threads));
        std::cerr << "m=" << m << " detection_rate=" << format_number(all.back().detection_rate)
                  << " post_retrain_LP=" << format_number(all.back().post_retrain_lp) << '\n';
    }
    std::ofstream f;
    write_recovery_csv(open_out(out, f), all);
    return 0;
}

int cmd_eval(const std::string& network_path, const std::string& stream_path, const Overrides& o,
             const std::string& predictions_out)
{
    std::ifstream in(network_path);
    if (!in)
        throw std::runtime_error("cannot open '" + network_path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    SavedNetwork saved = network_from_json(buf.str());
    if (saved.readouts.empty())
        throw std::runtime_error("network file has no readouts");
    const Readout& readout = saved.readouts.front();

    BitStreams streams;
    const ExperimentConfig cfg = resolve(o);
    if (!stream_path.empty()) {
        std::ifstream s(stream_path);
        if (!s)
            throw std::runtime_error("cannot open '" + stream_path + "'");
        streams = read_streams_csv(s, saved.network.config.n_inputs);
    } else {
        TaskSpec task = cfg.setup.task;
        task.seed = cfg.master_seed;
        streams = generate_streams(task);
    }
    if (streams.inputs.cols() != saved.network.n_inputs() || streams.targets.cols() != readout.n_outputs())
        throw std::runtime_error("stream width does not match the saved network");

    const StateTrajectory traj = run(saved.network, to_real(streams.inputs), cfg.setup.washout);
    const AlignedBits bits = aligned_bits(readout, traj, streams.targets);
    std::cout << "accuracy=" << format_number(evaluate_accuracy(bits.predicted, bits.target))
              << " steps=" << bits.target.rows() << '\n';
    if (!predictions_out.empty()) {
        std::ofstream p(predictions_out);
        BitStreams pred{BitMatrix(bits.predicted.rows(), 0), bits.predicted};
        write_streams_csv(p, pred);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Echo-state-network logic simulator"};
    app.require_subcommand(1);

    Overrides o;
    std::string out;

    auto* train = app.add_subcommand("train", "run one trial and dump the network + readout as JSON");
    add_common(train, o);
    std::string streams_out;
    train->add_option("-o,--out", out, "network JSON output (default stdout)");
    train->add_option("--streams", streams_out, "also write the training stream CSV");

    auto* sw = app.add_subcommand("sweep", "grid sweep from the config's \"grid\" -> CSV");
    add_common(sw, o);
    sw->add_option("-o,--out", out, "CSV output (default stdout)");
    std::vector<std::string> grid;
    sw->add_option("-g,--grid", grid, "grid axis name=v1,v2,... (replaces the config's grid)");

    auto* am = app.add_subcommand("adder-mult", "joint 2-bit adder + multiplier yield -> CSV");
    add_common(am, o);
    am->add_option("-o,--out", out, "CSV output (default stdout)");

    auto* fs = app.add_subcommand("fault-sim", "fault detection and recovery experiment -> CSV");
    add_common(fs, o);
    fs->add_option("-o,--out", out, "CSV output (default stdout)");

    auto* ev = app.add_subcommand("eval", "replay a saved network on a stream");
    add_common(ev, o);
    std::string network_path, stream_path, predictions;
    ev->add_option("network", network_path, "network JSON written by train")->required();
    ev->add_option("--stream", stream_path, "stream CSV (default: generate from config task)");
    ev->add_option("--predictions", predictions, "write thresholded outputs as CSV");

    auto* st = app.add_subcommand("streams", "write the config task's stream as CSV");
    add_common(st, o);
    st->add_option("-o,--out", out, "CSV output (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*train) return cmd_train(o, out, streams_out);
        if (*sw) return cmd_sweep(o, grid, out);
        if (*am) return cmd_adder_mult(o, out);
        if (*fs) return cmd_fault_sim(o, out);
        if (*ev) return cmd_eval(network_path, stream_path, o, predictions);
        if (*st) {
            const ExperimentConfig cfg = resolve(o);
            TaskSpec task = cfg.setup.task;
            task.seed = cfg.master_seed;
            std::ofstream f;
            write_streams_csv(open_out(out, f), generate_streams(task));
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
