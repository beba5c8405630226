#pragma once

#include <span>

#include "nanoesn/readout.hpp"

namespace nanoesn {

/// Converts a bit matrix to the real-valued input/target representation.
inline Eigen::MatrixXd to_real(const BitMatrix& bits) { return bits.cast<double>(); }

struct Fit {
    Readout readout;
    StateTrajectory trajectory;
    double accuracy = 0.0; // on the fitted data
};

/// Drives `net` from zero state with `inputs`, fits a readout for `targets`
/// and scores it on the same trajectory.
Fit fit_readout(Network& net, const BitMatrix& inputs, const BitMatrix& targets,
                const ReadoutParams& params, const VisibleMask& mask, Eigen::Index washout,
                const WeightSchedule& schedule = {});

/// Drives `net` from zero state with `inputs` and scores `readout` on the
/// selected output columns (all when `columns` is empty).
double replay_accuracy(Network& net, const Readout& readout, const BitMatrix& inputs,
                       const BitMatrix& targets, Eigen::Index washout,
                       const WeightSchedule& schedule = {},
                       std::span<const Eigen::Index> columns = {});

/// Accuracy of readout on a recorded trajectory, restricted to `columns`.
double trajectory_accuracy(const Readout& readout, const StateTrajectory& traj,
                           const BitMatrix& targets, std::span<const Eigen::Index> columns = {});

} // namespace nanoesn
