#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nanoesn/logic_tasks.hpp"
#include "nanoesn/perturbation.hpp"
#include "nanoesn/readout.hpp"
#include "nanoesn/reservoir.hpp"

namespace nanoesn {

inline constexpr Eigen::Index kDefaultWashout = 10;

/// Everything one Monte-Carlo trial needs. Seeds live in `network.seed`,
/// `task.seed` and `variation->seed`; see seed_trial().
struct TrialSetup {
    NetworkConfig network;
    TaskSpec task;
    ReadoutParams readout;
    Eigen::Index washout = kDefaultWashout;
    std::optional<VariationModel> variation;
};

/// Harness defaults: N=100, T=1000, gamma=0.015, v=1.0, lambda=0.1,
/// delta_in=0.5, tau=1, theta=0.5, Normal weights, saturated-linear nodes,
/// temporal variation n=1, sigma=0.1.
TrialSetup default_setup();

/// Returns `setup` with every random stream keyed off `trial_seed`.
TrialSetup seed_trial(TrialSetup setup, std::uint64_t trial_seed);

struct TrialMetrics {
    double tr = 0.0;
    double gr = 0.0;
    std::uint64_t seed = 0;
    bool degenerate = false; // reservoir could not be built; counted as a failed trial
};

struct TrialOutcome {
    TrialMetrics metrics;
    Network network;
    Readout readout;
};

/// Build, train on one stream, test on an independent one. The network's
/// shape (inputs/outputs) follows the task. Throws DegenerateReservoirError.
TrialOutcome run_trial_detailed(const TrialSetup& setup);
TrialMetrics run_trial(const TrialSetup& setup);

struct Probabilities {
    double tp = 0.0;
    double gp = 0.0;
    double lp_joint = 0.0;
    double lp_product = 0.0;
    int trials = 0;
};

/// TP, GP and both LP readings. A trial is perfect only at exactly 1.0.
Probabilities estimate_probabilities(std::span<const TrialMetrics> metrics);

struct GridAxis {
    std::string name;
    std::vector<double> values;
};

/// Axis names: v, lambda, delta_i, delta_r, delta_o, delta_io (sets delta_i
/// and delta_o together), k, N, gamma, tau, theta, sigma, n_noise, p, T.
void apply_axis(TrialSetup& setup, const std::string& name, double value);

struct SweepResult {
    TrialSetup setup; // the cell's configuration
    std::vector<std::pair<std::string, double>> coords;
    Probabilities probs;
    std::uint64_t master_seed = 0;
};

/// Seed for a cell, a function of its coordinates only.
std::uint64_t cell_seed(std::uint64_t master_seed,
                        const std::vector<std::pair<std::string, double>>& coords);

/// Runs `trials` trials for a single configuration and aggregates them.
/// Trial i uses derive_seed(seed, {i}). `threads` = 0 picks the hardware count.
std::vector<TrialMetrics> run_trials(const TrialSetup& setup, int trials, std::uint64_t seed,
                                     unsigned threads = 0);

/// Cartesian product over `grid`, one SweepResult per cell in row-major order.
std::vector<SweepResult> sweep(const TrialSetup& base, const std::vector<GridAxis>& grid,
                               int trials, std::uint64_t master_seed, unsigned threads = 0);

/// The joint 2-bit adder + 2-bit multiplier on one N=100 reservoir with
/// delta_in = delta_out = 0.5.
TrialSetup adder_multiplier_setup();
SweepResult run_adder_multiplier(const TrialSetup& setup, int trials, std::uint64_t master_seed,
                                 unsigned threads = 0);

void write_sweep_csv_header(std::ostream& os);
void write_sweep_csv_row(std::ostream& os, const SweepResult& r);
void write_sweep_csv(std::ostream& os, std::span<const SweepResult> results);

/// Shortest round-trip decimal form of a double.
std::string format_number(double value);

/// Runs fn(i) for i in [0, count) on up to `threads` workers; rethrows the
/// first exception.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

} // namespace nanoesn
