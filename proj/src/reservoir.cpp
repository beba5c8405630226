#include "nanoesn/reservoir.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/Eigenvalues>

namespace nanoesn {

std::string_view to_string(WeightPattern p)
{
    switch (p) {
    case WeightPattern::Identical: return "Identical";
    case WeightPattern::Uniform: return "Uniform";
    case WeightPattern::Normal: return "Normal";
    }
    return "?";
}

std::string_view to_string(TransferKind k)
{
    switch (k) {
    case TransferKind::SatLinear: return "SatLinear";
    case TransferKind::Tanh: return "Tanh";
    case TransferKind::SatLinearVariable: return "SatLinearVariable";
    case TransferKind::TanhVariable: return "TanhVariable";
    }
    return "?";
}

std::string_view to_string(InputWiring w)
{
    return w == InputWiring::PerNode ? "PerNode" : "PerPair";
}

InputWiring parse_input_wiring(std::string_view s)
{
    if (s == "PerNode") return InputWiring::PerNode;
    if (s == "PerPair") return InputWiring::PerPair;
    throw std::invalid_argument("unknown input wiring '" + std::string(s) + "'");
}

WeightPattern parse_weight_pattern(std::string_view s)
{
    if (s == "Identical" || s == "I") return WeightPattern::Identical;
    if (s == "Uniform" || s == "U") return WeightPattern::Uniform;
    if (s == "Normal" || s == "N") return WeightPattern::Normal;
    throw std::invalid_argument("unknown weight pattern '" + std::string(s) + "'");
}

TransferKind parse_transfer(std::string_view s)
{
    if (s == "SatLinear" || s == "L") return TransferKind::SatLinear;
    if (s == "Tanh" || s == "T") return TransferKind::Tanh;
    if (s == "SatLinearVariable" || s == "LV") return TransferKind::SatLinearVariable;
    if (s == "TanhVariable" || s == "TV") return TransferKind::TanhVariable;
    throw std::invalid_argument("unknown transfer kind '" + std::string(s) + "'");
}

namespace {

bool in_unit_interval(double d) { return d >= 0.0 && d <= 1.0; }

} // namespace

void NetworkConfig::validate() const
{
    if (n_nodes < 1)
        throw std::invalid_argument("network config: N must be >= 1");
    if (!(spectral_radius > 0.0 && spectral_radius < 1.0))
        throw std::invalid_argument("network config: lambda must lie in (0, 1)");
    if (!in_unit_interval(delta_in) || !in_unit_interval(delta_res) || !in_unit_interval(delta_out))
        throw std::invalid_argument("network config: connection fractions must lie in [0, 1]");
    if (n_inputs < 1)
        throw std::invalid_argument("network config: n_inputs must be >= 1");
    if (n_outputs < 0)
        throw std::invalid_argument("network config: n_outputs must be >= 0");
    if (!std::isfinite(input_coeff))
        throw std::invalid_argument("network config: v must be finite");
}

DegenerateReservoirError::DegenerateReservoirError(std::uint64_t seed, const std::string& detail)
    : std::runtime_error("degenerate reservoir (seed " + std::to_string(seed) + "): " + detail),
      seed_(seed)
{
}

SpectralEstimate spectral_radius(const Eigen::MatrixXd& m, double rel_tol, int max_iter)
{
    if (m.rows() != m.cols())
        throw std::invalid_argument("spectral_radius: matrix must be square");
    SpectralEstimate est;
    if (m.size() == 0 || m.isZero(0.0)) {
        est.converged = true;
        return est;
    }

    constexpr int kStableSteps = 5;
    const Eigen::Index n = m.rows();
    // Fixed, non-symmetric start vector so the result is reproducible.
    Eigen::VectorXd x(n);
    for (Eigen::Index i = 0; i < n; ++i)
        x[i] = 1.0 + 0.5 * std::sin(static_cast<double>(i) + 1.0);
    x.normalize();

    double prev = -1.0;
    int stable = 0;
    for (int it = 1; it <= max_iter; ++it) {
        Eigen::VectorXd y = m * x;
        const double growth = y.norm();
        est.iterations = it;
        est.value = growth;
        if (growth == 0.0) {
            est.converged = true;
            return est;
        }
        if (prev >= 0.0 && std::abs(growth - prev) <= rel_tol * growth) {
            if (++stable >= kStableSteps) {
                est.converged = true;
                return est;
            }
        } else {
            stable = 0;
        }
        prev = growth;
        x = y / growth;
    }
    return est;
}

double spectral_radius_dense(const Eigen::MatrixXd& m)
{
    if (m.rows() != m.cols())
        throw std::invalid_argument("spectral_radius_dense: matrix must be square");
    if (m.size() == 0)
        return 0.0;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(m, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("spectral_radius_dense: eigenvalue iteration failed");
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

double spectral_radius_robust(const Eigen::MatrixXd& m)
{
    const SpectralEstimate est = spectral_radius(m);
    if (est.converged)
        return est.value;
    return spectral_radius_dense(m);
}

void scale_spectral_radius(Eigen::MatrixXd& w, double target, std::uint64_t seed)
{
    const double radius = spectral_radius_robust(w);
    const double scale = w.size() ? w.cwiseAbs().maxCoeff() : 0.0;
    if (!(radius > 1e-12 * scale))
        throw DegenerateReservoirError(seed, "unscaled reservoir matrix has spectral radius 0");
    w *= target / radius;
}

Eigen::MatrixXd draw_reservoir_weights(const NetworkConfig& config, Rng& rng)
{
    const Eigen::Index n = config.n_nodes;
    const auto slots = static_cast<std::size_t>(n * n);
    const auto count = static_cast<std::size_t>(std::llround(config.delta_res * static_cast<double>(slots)));

    std::vector<std::size_t> all(slots);
    std::iota(all.begin(), all.end(), std::size_t{0});
    std::vector<std::size_t> chosen;
    chosen.reserve(count);
    std::sample(all.begin(), all.end(), std::back_inserter(chosen), count, rng);

    std::uniform_real_distribution<double> uniform(-1.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t slot : chosen) {
        double value = 1.0;
        switch (config.weight_pattern) {
        case WeightPattern::Identical: value = 1.0; break;
        case WeightPattern::Uniform: value = uniform(rng); break;
        case WeightPattern::Normal: value = normal(rng); break;
        }
        w(static_cast<Eigen::Index>(slot / n), static_cast<Eigen::Index>(slot % n)) = value;
    }
    return w;
}

Eigen::MatrixXd draw_input_weights(const NetworkConfig& config, Rng& rng)
{
    const Eigen::Index n = config.n_nodes;
    const Eigen::Index k = config.n_inputs;
    const bool per_node = config.input_wiring == InputWiring::PerNode;
    const auto slots = static_cast<std::size_t>(per_node ? n : n * k);
    const auto count = static_cast<std::size_t>(std::llround(config.delta_in * static_cast<double>(slots)));

    std::vector<std::size_t> all(slots);
    std::iota(all.begin(), all.end(), std::size_t{0});
    std::vector<std::size_t> chosen;
    chosen.reserve(count);
    std::sample(all.begin(), all.end(), std::back_inserter(chosen), count, rng);

    std::bernoulli_distribution sign(0.5);
    std::normal_distribution<double> noise(0.0, 1.0);
    const auto draw = [&] {
        const double s = sign(rng) ? 1.0 : -1.0;
        return s * config.input_coeff + noise(rng);
    };
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, k);
    for (std::size_t slot : chosen) {
        if (per_node) {
            for (Eigen::Index j = 0; j < k; ++j)
                w(static_cast<Eigen::Index>(slot), j) = draw();
        } else {
            // (input, node) pairs enumerated input-major
            w(static_cast<Eigen::Index>(slot % n), static_cast<Eigen::Index>(slot / n)) = draw();
        }
    }
    return w;
}

Network build_network(const NetworkConfig& config)
{
    config.validate();
    Rng rng(config.seed);

    Network net;
    net.config = config;
    net.w_in = draw_input_weights(config, rng);
    net.w_res = draw_reservoir_weights(config, rng);
    scale_spectral_radius(net.w_res, config.spectral_radius, config.seed);

    net.gains = Eigen::VectorXd::Ones(config.n_nodes);
    if (is_variable(config.transfer)) {
        std::uniform_real_distribution<double> gain(0.0, 2.0);
        for (Eigen::Index i = 0; i < net.gains.size(); ++i)
            net.gains[i] = gain(rng);
    }
    net.state = Eigen::VectorXd::Zero(config.n_nodes);
    return net;
}

Eigen::VectorXd transfer_apply(const Network& net, const Eigen::VectorXd& pre_activation)
{
    if (pre_activation.size() != net.gains.size())
        throw std::invalid_argument("transfer_apply: length mismatch");
    const Eigen::ArrayXd z = net.gains.array() * pre_activation.array();
    switch (net.config.transfer) {
    case TransferKind::SatLinear:
    case TransferKind::SatLinearVariable:
        return z.max(-1.0).min(1.0).matrix();
    case TransferKind::Tanh:
    case TransferKind::TanhVariable:
        return z.tanh().matrix();
    }
    return z.matrix();
}

const Eigen::VectorXd& step(Network& net, const Eigen::VectorXd& u,
                            const Eigen::MatrixXd* effective_w_res)
{
    const Eigen::MatrixXd& w = effective_w_res ? *effective_w_res : net.w_res;
    if (w.rows() != net.w_res.rows() || w.cols() != net.w_res.cols())
        throw std::invalid_argument("step: override matrix has the wrong shape");
    if (u.size() != net.w_in.cols())
        throw std::invalid_argument("step: input length does not match n_inputs");
    net.state = transfer_apply(net, w * net.state + net.w_in * u);
    return net.state;
}

StateTrajectory run(Network& net, const Eigen::MatrixXd& inputs, Eigen::Index washout,
                    const WeightSchedule& schedule)
{
    const Eigen::Index steps = inputs.rows();
    if (steps == 0)
        throw std::invalid_argument("run: empty input sequence");
    if (washout < 0 || washout >= steps)
        throw std::invalid_argument("run: washout must be in [0, sequence length)");
    if (inputs.cols() != net.n_inputs())
        throw std::invalid_argument("run: input width does not match n_inputs");

    const Eigen::Index n = net.size();
    StateTrajectory traj;
    traj.t0 = washout;
    traj.rows.resize(steps - washout, n + 1);

    net.reset_state();
    Eigen::VectorXd u(inputs.cols());
    for (Eigen::Index t = 0; t < steps; ++t) {
        u = inputs.row(t).transpose();
        const Eigen::MatrixXd* w = schedule ? schedule(t) : nullptr;
        step(net, u, w);
        if (t >= washout) {
            traj.rows.row(t - washout).head(n) = net.state.transpose();
            traj.rows(t - washout, n) = 1.0;
        }
    }
    return traj;
}

} // namespace nanoesn
