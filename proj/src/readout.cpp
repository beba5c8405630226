#include "nanoesn/readout.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>

namespace nanoesn {

std::string_view to_string(RidgeSign s)
{
    return s == RidgeSign::StandardRidge ? "StandardRidge" : "SubtractedRidge";
}

RidgeSign parse_ridge_sign(std::string_view s)
{
    if (s == "StandardRidge") return RidgeSign::StandardRidge;
    if (s == "SubtractedRidge") return RidgeSign::SubtractedRidge;
    throw std::invalid_argument("unknown sign mode '" + std::string(s) + "'");
}

VisibleMask full_mask(Eigen::Index n_nodes)
{
    return VisibleMask(static_cast<std::size_t>(n_nodes), true);
}

VisibleMask draw_visible_mask(Eigen::Index n_nodes, double delta_out, Rng& rng)
{
    if (delta_out < 0.0 || delta_out > 1.0)
        throw std::invalid_argument("draw_visible_mask: delta_out must lie in [0, 1]");
    const auto n = static_cast<std::size_t>(n_nodes);
    const auto count = static_cast<std::size_t>(std::llround(delta_out * static_cast<double>(n)));
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    std::vector<std::size_t> chosen;
    std::sample(all.begin(), all.end(), std::back_inserter(chosen), count, rng);
    VisibleMask mask(n, false);
    for (std::size_t i : chosen)
        mask[i] = true;
    return mask;
}

SingularSystemError::SingularSystemError(RidgeSign mode, double rcond)
    : std::runtime_error("singular regression system (" + std::string(to_string(mode)) +
                         ", reciprocal condition estimate " + std::to_string(rcond) + ")"),
      mode_(mode), rcond_(rcond)
{
}

Eigen::MatrixXd solve_regression(const RegressionProblem& problem)
{
    const Eigen::MatrixXd& x = problem.design;
    const Eigen::MatrixXd& y = problem.targets;
    if (x.rows() != y.rows())
        throw std::invalid_argument("solve_regression: design and target row counts differ");
    if (problem.gamma < 0.0)
        throw std::invalid_argument("solve_regression: gamma must be >= 0");
    if (x.rows() == 0)
        throw std::invalid_argument("solve_regression: no training rows");

    const double g2 = problem.gamma * problem.gamma;
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(x.cols(), x.cols());
    gram.selfadjointView<Eigen::Lower>().rankUpdate(x.transpose());
    gram = gram.selfadjointView<Eigen::Lower>();
    const Eigen::MatrixXd rhs = x.transpose() * y;
    constexpr double eps = std::numeric_limits<double>::epsilon();

    if (problem.sign_mode == RidgeSign::StandardRidge) {
        gram.diagonal().array() += g2;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
        const Eigen::ArrayXd d = ldlt.vectorD().array().abs();
        const double pivot_ratio = d.maxCoeff() > 0.0 ? d.minCoeff() / d.maxCoeff() : 0.0;
        const double rcond =
            ldlt.info() == Eigen::Success ? std::min(ldlt.rcond(), pivot_ratio) : 0.0;
        if (!(rcond > eps))
            throw SingularSystemError(problem.sign_mode, rcond);
        return ldlt.solve(rhs);
    }

    // The shifted system can be indefinite; solve through the symmetric
    // eigendecomposition instead of a pivoted Cholesky.
    gram.diagonal().array() -= g2;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    if (eig.info() != Eigen::Success)
        throw SingularSystemError(problem.sign_mode, 0.0);
    const Eigen::VectorXd& ev = eig.eigenvalues();
    const double largest = ev.cwiseAbs().maxCoeff();
    const double smallest = ev.cwiseAbs().minCoeff();
    const double rcond = largest > 0.0 ? smallest / largest : 0.0;
    if (!(rcond > eps))
        throw SingularSystemError(problem.sign_mode, rcond);
    const Eigen::MatrixXd& v = eig.eigenvectors();
    return v * (ev.cwiseInverse().asDiagonal() * (v.transpose() * rhs));
}

Alignment align(const StateTrajectory& traj, Eigen::Index n_targets, int tau)
{
    if (tau < 0)
        throw std::invalid_argument("align: tau must be >= 0");
    // target s <-> row i where s = t0 + i + 1 - tau
    const Eigen::Index offset = traj.t0 + 1 - tau;
    const Eigen::Index first_row = std::max<Eigen::Index>(0, -offset);
    const Eigen::Index last_row = std::min<Eigen::Index>(traj.size(), n_targets - offset);
    Alignment a;
    a.first_row = first_row;
    a.first_target = first_row + offset;
    a.count = std::max<Eigen::Index>(0, last_row - first_row);
    return a;
}

namespace {

std::vector<Eigen::Index> visible_columns(const VisibleMask& mask, Eigen::Index n_nodes)
{
    if (static_cast<Eigen::Index>(mask.size()) != n_nodes)
        throw std::invalid_argument("visible mask length does not match the reservoir size");
    std::vector<Eigen::Index> cols;
    for (Eigen::Index i = 0; i < n_nodes; ++i)
        if (mask[static_cast<std::size_t>(i)])
            cols.push_back(i);
    cols.push_back(n_nodes); // bias
    return cols;
}

} // namespace

Readout train(const StateTrajectory& traj, const Eigen::MatrixXd& targets,
              const ReadoutParams& params, const VisibleMask& mask)
{
    const Eigen::Index n_nodes = traj.rows.cols() - 1;
    const Alignment a = align(traj, targets.rows(), params.tau);
    if (a.count <= 0)
        throw std::invalid_argument("train: no trajectory rows pair with a target after delay alignment");
    if (!(params.theta > 0.0 && params.theta < 1.0))
        throw std::invalid_argument("train: theta must lie in (0, 1)");

    const std::vector<Eigen::Index> cols = visible_columns(mask, n_nodes);
    RegressionProblem problem;
    problem.design = traj.rows(Eigen::seqN(a.first_row, a.count), cols);
    problem.targets = targets.middleRows(a.first_target, a.count);
    problem.gamma = params.gamma;
    problem.sign_mode = params.sign_mode;
    const Eigen::MatrixXd w = solve_regression(problem);

    Readout r;
    r.w_out = Eigen::MatrixXd::Zero(targets.cols(), n_nodes + 1);
    for (std::size_t j = 0; j < cols.size(); ++j)
        r.w_out.col(cols[j]) = w.row(static_cast<Eigen::Index>(j)).transpose();
    r.tau = params.tau;
    r.theta = params.theta;
    r.gamma = params.gamma;
    r.sign_mode = params.sign_mode;
    r.visible_mask = mask;
    return r;
}

Eigen::MatrixXd predict(const Readout& readout, const StateTrajectory& traj)
{
    if (traj.rows.cols() != readout.w_out.cols())
        throw std::invalid_argument("predict: readout width does not match trajectory");
    return traj.rows * readout.w_out.transpose();
}

BitMatrix threshold_bits(const Eigen::MatrixXd& analog, double theta)
{
    return (analog.array() >= theta).cast<std::uint8_t>().matrix();
}

AlignedBits aligned_bits(const Readout& readout, const StateTrajectory& traj,
                         const BitMatrix& targets)
{
    const Alignment a = align(traj, targets.rows(), readout.tau);
    StateTrajectory window;
    window.rows = traj.rows.middleRows(a.first_row, a.count);
    window.t0 = traj.t0 + a.first_row;
    AlignedBits out;
    out.predicted = threshold_bits(predict(readout, window), readout.theta);
    out.target = targets.middleRows(a.first_target, a.count);
    return out;
}

} // namespace nanoesn
