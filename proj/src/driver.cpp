#include "nanoesn/driver.hpp"

#include <vector>

#include "nanoesn/logic_tasks.hpp"

namespace nanoesn {

double trajectory_accuracy(const Readout& readout, const StateTrajectory& traj,
                           const BitMatrix& targets, std::span<const Eigen::Index> columns)
{
    const AlignedBits bits = aligned_bits(readout, traj, targets);
    if (columns.empty())
        return evaluate_accuracy(bits.predicted, bits.target);
    const std::vector<Eigen::Index> cols(columns.begin(), columns.end());
    return evaluate_accuracy(bits.predicted(Eigen::all, cols), bits.target(Eigen::all, cols));
}

Fit fit_readout(Network& net, const BitMatrix& inputs, const BitMatrix& targets,
                const ReadoutParams& params, const VisibleMask& mask, Eigen::Index washout,
                const WeightSchedule& schedule)
{
    Fit fit;
    fit.trajectory = run(net, to_real(inputs), washout, schedule);
    fit.readout = train(fit.trajectory, to_real(targets), params, mask);
    fit.accuracy = trajectory_accuracy(fit.readout, fit.trajectory, targets);
    return fit;
}

double replay_accuracy(Network& net, const Readout& readout, const BitMatrix& inputs,
                       const BitMatrix& targets, Eigen::Index washout,
                       const WeightSchedule& schedule, std::span<const Eigen::Index> columns)
{
    const StateTrajectory traj = run(net, to_real(inputs), washout, schedule);
    return trajectory_accuracy(readout, traj, targets, columns);
}

} // namespace nanoesn
