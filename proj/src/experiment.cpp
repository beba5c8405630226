#include "nanoesn/experiment.hpp"

#include <atomic>
#include <bit>
#include <charconv>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "nanoesn/driver.hpp"

namespace nanoesn {

TrialSetup default_setup()
{
    TrialSetup s;
    s.network.n_nodes = 100;
    s.network.input_coeff = 1.0;
    s.network.spectral_radius = 0.1;
    s.network.delta_in = 0.5;
    s.network.delta_res = 1.0;
    s.network.delta_out = 1.0;
    s.network.weight_pattern = WeightPattern::Normal;
    s.network.transfer = TransferKind::SatLinear;
    s.task.kind = TaskKind::Nand;
    s.task.k = 5;
    s.task.length = 1000;
    s.task.p = 0.5;
    s.readout = ReadoutParams{};
    s.washout = kDefaultWashout;
    s.variation = VariationModel{1, 0.1, 0};
    return s;
}

TrialSetup seed_trial(TrialSetup setup, std::uint64_t trial_seed)
{
    setup.network.seed = derive_seed(trial_seed, Stream::Network);
    setup.task.seed = derive_seed(trial_seed, Stream::TrainInputs);
    if (setup.variation)
        setup.variation->seed = derive_seed(trial_seed, Stream::Noise);
    return setup;
}

TrialOutcome run_trial_detailed(const TrialSetup& setup)
{
    setup.task.validate();
    NetworkConfig config = setup.network;
    config.n_inputs = setup.task.n_inputs();
    config.n_outputs = setup.task.n_outputs();

    TrialOutcome out;
    out.metrics.seed = config.seed;
    out.network = build_network(config);
    Network& net = out.network;

    Rng mask_rng(derive_seed(config.seed, Stream::ReadoutMask));
    const VisibleMask mask = draw_visible_mask(net.size(), config.delta_out, mask_rng);

    const BitStreams train_streams = generate_streams(setup.task);
    TaskSpec test_task = setup.task;
    test_task.seed = derive_seed(setup.task.seed, Stream::TestInputs);
    const BitStreams test_streams = generate_streams(test_task);

    // Train and test phases draw from separate noise streams.
    std::optional<NoisyWeightSource> train_noise;
    std::optional<NoisyWeightSource> test_noise;
    WeightSchedule train_schedule;
    WeightSchedule test_schedule;
    if (setup.variation) {
        VariationModel m = *setup.variation;
        m.seed = derive_seed(setup.variation->seed, {0});
        train_noise.emplace(net.w_res, m);
        train_schedule = train_noise->schedule();
        m.seed = derive_seed(setup.variation->seed, {1});
        test_noise.emplace(net.w_res, m);
        test_schedule = test_noise->schedule();
    }

    Fit fit = fit_readout(net, train_streams.inputs, train_streams.targets, setup.readout, mask,
                          setup.washout, train_schedule);
    out.metrics.tr = fit.accuracy;
    out.metrics.gr = replay_accuracy(net, fit.readout, test_streams.inputs, test_streams.targets,
                                     setup.washout, test_schedule);
    out.readout = std::move(fit.readout);
    return out;
}

TrialMetrics run_trial(const TrialSetup& setup)
{
    return run_trial_detailed(setup).metrics;
}

Probabilities estimate_probabilities(std::span<const TrialMetrics> metrics)
{
    if (metrics.empty())
        throw std::invalid_argument("estimate_probabilities: no trials");
    int perfect_tr = 0;
    int perfect_gr = 0;
    int perfect_both = 0;
    for (const TrialMetrics& m : metrics) {
        const bool tr = m.tr == 1.0;
        const bool gr = m.gr == 1.0;
        perfect_tr += tr;
        perfect_gr += gr;
        perfect_both += tr && gr;
    }
    const double n = static_cast<double>(metrics.size());
    Probabilities p;
    p.trials = static_cast<int>(metrics.size());
    p.tp = perfect_tr / n;
    p.gp = perfect_gr / n;
    p.lp_joint = perfect_both / n;
    p.lp_product = p.tp * p.gp;
    return p;
}

void apply_axis(TrialSetup& s, const std::string& name, double value)
{
    const auto as_int = [&] {
        const double r = std::round(value);
        if (r != value)
            throw std::invalid_argument("axis '" + name + "' needs integer values");
        return static_cast<int>(r);
    };
    auto variation = [&]() -> VariationModel& {
        if (!s.variation)
            s.variation = VariationModel{1, 0.0, 0};
        return *s.variation;
    };
    if (name == "v") s.network.input_coeff = value;
    else if (name == "lambda") s.network.spectral_radius = value;
    else if (name == "delta_i") s.network.delta_in = value;
    else if (name == "delta_r") s.network.delta_res = value;
    else if (name == "delta_o") s.network.delta_out = value;
    else if (name == "delta_io") s.network.delta_in = s.network.delta_out = value;
    else if (name == "k") s.task.k = as_int();
    else if (name == "N") s.network.n_nodes = as_int();
    else if (name == "gamma") s.readout.gamma = value;
    else if (name == "tau") s.readout.tau = as_int();
    else if (name == "theta") s.readout.theta = value;
    else if (name == "sigma") variation().sigma = value;
    else if (name == "n_noise") variation().n = as_int();
    else if (name == "p") s.task.p = value;
    else if (name == "T") s.task.length = as_int();
    else throw std::invalid_argument("unknown sweep axis '" + name + "'");
}

std::uint64_t cell_seed(std::uint64_t master_seed,
                        const std::vector<std::pair<std::string, double>>& coords)
{
    std::uint64_t s = master_seed;
    for (const auto& [name, value] : coords) {
        std::uint64_t h = 0xcbf29ce484222325ULL; // FNV-1a
        for (unsigned char c : name)
            h = (h ^ c) * 0x100000001b3ULL;
        s = derive_seed(s, {h, std::bit_cast<std::uint64_t>(value == 0.0 ? 0.0 : value)});
    }
    return s;
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn)
{
    if (threads == 0)
        threads = std::max(1U, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error)
                        error = std::current_exception();
                    next = count;
                }
            }
        });
    pool.clear();
    if (error)
        std::rethrow_exception(error);
}

std::vector<TrialMetrics> run_trials(const TrialSetup& setup, int trials, std::uint64_t seed,
                                     unsigned threads)
{
    if (trials < 1)
        throw std::invalid_argument("run_trials: need at least one trial");
    std::vector<TrialMetrics> metrics(static_cast<std::size_t>(trials));
    parallel_for(metrics.size(), threads, [&](std::size_t i) {
        const std::uint64_t trial_seed = derive_seed(seed, {static_cast<std::uint64_t>(i)});
        try {
            metrics[i] = run_trial(seed_trial(setup, trial_seed));
        } catch (const DegenerateReservoirError&) {
            metrics[i].degenerate = true;
        }
        metrics[i].seed = trial_seed;
    });
    return metrics;
}

std::vector<SweepResult> sweep(const TrialSetup& base, const std::vector<GridAxis>& grid,
                               int trials, std::uint64_t master_seed, unsigned threads)
{
    if (grid.empty())
        throw std::invalid_argument("sweep: empty grid");
    std::size_t cells = 1;
    for (const GridAxis& axis : grid) {
        if (axis.values.empty())
            throw std::invalid_argument("sweep: axis '" + axis.name + "' has no values");
        cells *= axis.values.size();
    }

    std::vector<SweepResult> results;
    results.reserve(cells);
    for (std::size_t c = 0; c < cells; ++c) {
        SweepResult r;
        r.setup = base;
        r.master_seed = master_seed;
        std::size_t rest = c;
        std::vector<std::size_t> index(grid.size());
        for (std::size_t a = grid.size(); a-- > 0;) {
            index[a] = rest % grid[a].values.size();
            rest /= grid[a].values.size();
        }
        for (std::size_t a = 0; a < grid.size(); ++a) {
            const double value = grid[a].values[index[a]];
            apply_axis(r.setup, grid[a].name, value);
            r.coords.emplace_back(grid[a].name, value);
        }
        r.setup.network.validate();
        r.setup.task.validate();
        results.push_back(std::move(r));
    }

    for (SweepResult& r : results) {
        const auto metrics = run_trials(r.setup, trials, cell_seed(master_seed, r.coords), threads);
        r.probs = estimate_probabilities(metrics);
    }
    return results;
}

TrialSetup adder_multiplier_setup()
{
    TrialSetup s = default_setup();
    s.task.kind = TaskKind::AdderMultiplier2;
    s.task.k = 4;
    s.network.delta_in = 0.5;
    s.network.delta_out = 0.5;
    return s;
}

SweepResult run_adder_multiplier(const TrialSetup& setup, int trials, std::uint64_t master_seed,
                                 unsigned threads)
{
    if (trials < 1)
        throw std::invalid_argument("run_adder_multiplier: need at least one trial");
    SweepResult r;
    r.setup = setup;
    r.master_seed = master_seed;
    const auto metrics = run_trials(setup, trials, cell_seed(master_seed, {}), threads);
    r.probs = estimate_probabilities(metrics);
    return r;
}

std::string format_number(double value)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

void write_sweep_csv_header(std::ostream& os)
{
    os << "task,k,N,weight_pattern,transfer,v,lambda,delta_i,delta_r,delta_o,gamma,tau,sigma,"
          "n_noise,trials,TP,GP,LP_joint,LP_product,master_seed\n";
}

void write_sweep_csv_row(std::ostream& os, const SweepResult& r)
{
    const TrialSetup& s = r.setup;
    const double sigma = s.variation ? s.variation->sigma : 0.0;
    const int n_noise = s.variation ? s.variation->n : 0;
    os << to_string(s.task.kind) << ',' << s.task.n_inputs() << ',' << s.network.n_nodes << ','
       << to_string(s.network.weight_pattern) << ',' << to_string(s.network.transfer) << ','
       << format_number(s.network.input_coeff) << ',' << format_number(s.network.spectral_radius)
       << ',' << format_number(s.network.delta_in) << ',' << format_number(s.network.delta_res)
       << ',' << format_number(s.network.delta_out) << ',' << format_number(s.readout.gamma) << ','
       << s.readout.tau << ',' << format_number(sigma) << ',' << n_noise << ',' << r.probs.trials
       << ',' << format_number(r.probs.tp) << ',' << format_number(r.probs.gp) << ','
       << format_number(r.probs.lp_joint) << ',' << format_number(r.probs.lp_product) << ','
       << r.master_seed << '\n';
}

void write_sweep_csv(std::ostream& os, std::span<const SweepResult> results)
{
    write_sweep_csv_header(os);
    for (const SweepResult& r : results)
        write_sweep_csv_row(os, r);
}

} // namespace nanoesn
