#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "nanoesn/seeding.hpp"

namespace nanoesn {

enum class WeightPattern { Identical, Uniform, Normal };
enum class TransferKind { SatLinear, Tanh, SatLinearVariable, TanhVariable };

/// How delta_in is realized. PerNode: round(delta_in * N) nodes receive
/// every input. PerPair: round(delta_in * n_inputs * N) (input, node) pairs.
enum class InputWiring { PerNode, PerPair };

std::string_view to_string(WeightPattern p);
std::string_view to_string(TransferKind k);
std::string_view to_string(InputWiring w);
InputWiring parse_input_wiring(std::string_view s);
WeightPattern parse_weight_pattern(std::string_view s);
TransferKind parse_transfer(std::string_view s);

constexpr bool is_variable(TransferKind k)
{
    return k == TransferKind::SatLinearVariable || k == TransferKind::TanhVariable;
}

/// Build-time hyperparameters of a reservoir.
struct NetworkConfig {
    int n_nodes = 100;
    double input_coeff = 1.0;    // v
    double spectral_radius = 0.1; // lambda
    double delta_in = 0.5;
    double delta_res = 1.0;
    double delta_out = 1.0;
    WeightPattern weight_pattern = WeightPattern::Normal;
    TransferKind transfer = TransferKind::SatLinear;
    InputWiring input_wiring = InputWiring::PerNode;
    int n_inputs = 1;
    int n_outputs = 1;
    std::uint64_t seed = 0;

    /// Throws std::invalid_argument naming the first violated constraint.
    void validate() const;
};

/// Raised when the unscaled reservoir matrix has spectral radius zero.
class DegenerateReservoirError : public std::runtime_error {
public:
    DegenerateReservoirError(std::uint64_t seed, const std::string& detail);
    std::uint64_t seed() const noexcept { return seed_; }

private:
    std::uint64_t seed_;
};

/// A realized reservoir. Plain value type; copying gives an independent
/// device with the same weights and state.
struct Network {
    NetworkConfig config;
    Eigen::MatrixXd w_in;   // N x n_inputs, (i, j) = weight from input j to node i
    Eigen::MatrixXd w_res;  // N x N, scaled
    Eigen::VectorXd gains;  // per-node transfer multiplier
    Eigen::VectorXd state;  // x(t)

    Eigen::Index size() const { return w_res.rows(); }
    Eigen::Index n_inputs() const { return w_in.cols(); }
    void reset_state() { state.setZero(); }
};

struct SpectralEstimate {
    double value = 0.0;
    bool converged = false;
    int iterations = 0;
};

/// Power iteration on the growth of ||M^k x||. Converged when the per-step
/// growth factor is stable to `rel_tol` over several consecutive steps.
/// A matrix whose iterates vanish has radius 0 (reported converged).
SpectralEstimate spectral_radius(const Eigen::MatrixXd& m, double rel_tol = 1e-10,
                                 int max_iter = 10000);

/// Max |eigenvalue| from a dense Hessenberg-QR eigen decomposition.
double spectral_radius_dense(const Eigen::MatrixXd& m);

/// Spectral radius via power iteration with dense fallback when the
/// dominant eigenvalues form a complex pair (power iteration cannot settle).
double spectral_radius_robust(const Eigen::MatrixXd& m);

/// Rescales `w` in place to spectral radius `target`. Throws
/// DegenerateReservoirError (carrying `seed`) if the radius is zero.
void scale_spectral_radius(Eigen::MatrixXd& w, double target, std::uint64_t seed);

/// Unscaled reservoir matrix: round(delta_res * N^2) slots, values per pattern.
Eigen::MatrixXd draw_reservoir_weights(const NetworkConfig& config, Rng& rng);

/// Input matrix; every connected entry is s*v + eps with s = +-1 equiprobable
/// and eps ~ N(0, 1). Connectivity follows config.input_wiring.
Eigen::MatrixXd draw_input_weights(const NetworkConfig& config, Rng& rng);

Network build_network(const NetworkConfig& config);

/// f(gain_i * z_i) elementwise.
Eigen::VectorXd transfer_apply(const Network& net, const Eigen::VectorXd& pre_activation);

/// One update x(t+1) = f(W x(t) + W_in u(t)). `effective_w_res` replaces
/// W_res for this step only when non-null.
const Eigen::VectorXd& step(Network& net, const Eigen::VectorXd& u,
                            const Eigen::MatrixXd* effective_w_res = nullptr);

/// Rows are x'(t) = [x(t); 1]. Row i holds the state that absorbed input
/// index t0 + i.
struct StateTrajectory {
    Eigen::MatrixXd rows;
    Eigen::Index t0 = 0;

    Eigen::Index size() const { return rows.rows(); }
};

/// Supplies a per-step reservoir matrix override (or nullptr) for input index t.
using WeightSchedule = std::function<const Eigen::MatrixXd*(Eigen::Index t)>;

/// Drives `net` from x(0) = 0 through `inputs` (T x n_inputs) and keeps the
/// rows after the first `washout`. `net.state` ends at the final state.
StateTrajectory run(Network& net, const Eigen::MatrixXd& inputs, Eigen::Index washout,
                    const WeightSchedule& schedule = {});

} // namespace nanoesn
