#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "nanoesn/reservoir.hpp"

namespace nanoesn {

using BitMatrix = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Sign of the regularization term in the normal equations.
/// StandardRidge solves (X^T X + g^2 I) w = X^T Y; SubtractedRidge uses -g^2 I.
enum class RidgeSign { StandardRidge, SubtractedRidge };

std::string_view to_string(RidgeSign s);
RidgeSign parse_ridge_sign(std::string_view s);

/// Which reservoir nodes the readout can see.
using VisibleMask = std::vector<bool>;

VisibleMask full_mask(Eigen::Index n_nodes);

/// round(delta_out * N) visible nodes chosen uniformly without replacement.
VisibleMask draw_visible_mask(Eigen::Index n_nodes, double delta_out, Rng& rng);

struct ReadoutParams {
    double gamma = 0.015;
    int tau = 1;
    double theta = 0.5;
    RidgeSign sign_mode = RidgeSign::StandardRidge;
};

struct Readout {
    Eigen::MatrixXd w_out; // n_outputs x (N + 1); last column is the bias weight
    int tau = 1;
    double theta = 0.5;
    double gamma = 0.015;
    RidgeSign sign_mode = RidgeSign::StandardRidge;
    VisibleMask visible_mask;

    Eigen::Index n_outputs() const { return w_out.rows(); }
};

class SingularSystemError : public std::runtime_error {
public:
    SingularSystemError(RidgeSign mode, double rcond);
    RidgeSign mode() const noexcept { return mode_; }
    double rcond() const noexcept { return rcond_; }

private:
    RidgeSign mode_;
    double rcond_;
};

struct RegressionProblem {
    Eigen::MatrixXd design;  // T_eff x (M + 1), last column all ones
    Eigen::MatrixXd targets; // T_eff x n_outputs
    double gamma = 0.0;
    RidgeSign sign_mode = RidgeSign::StandardRidge;
};

/// Solves the regularized normal equations for every target column with a
/// single factorization of the Gram matrix. Returns (M + 1) x n_outputs.
/// Throws SingularSystemError when the reciprocal condition estimate falls
/// below machine precision.
Eigen::MatrixXd solve_regression(const RegressionProblem& problem);

/// Pairing between trajectory rows and target rows for output delay tau:
/// trajectory row (first_row + i) is compared with target row (first_target + i).
struct Alignment {
    Eigen::Index first_row = 0;
    Eigen::Index first_target = 0;
    Eigen::Index count = 0;
};

/// Row i holds x(t0 + i + 1); tau pairs target s with x(s + tau).
Alignment align(const StateTrajectory& traj, Eigen::Index n_targets, int tau);

/// Fits W_out against `targets` (full stream, T x n_outputs, indexed by
/// input step). Masked-out node columns are excluded from the solve and come
/// back as exact zeros.
Readout train(const StateTrajectory& traj, const Eigen::MatrixXd& targets,
              const ReadoutParams& params, const VisibleMask& mask);

/// y = W_out x' for every trajectory row (rows x n_outputs).
Eigen::MatrixXd predict(const Readout& readout, const StateTrajectory& traj);

/// 1 where value >= theta.
BitMatrix threshold_bits(const Eigen::MatrixXd& analog, double theta);

/// Thresholded predictions and the targets they are paired with.
struct AlignedBits {
    BitMatrix predicted;
    BitMatrix target;
};

AlignedBits aligned_bits(const Readout& readout, const StateTrajectory& traj,
                         const BitMatrix& targets);

} // namespace nanoesn
