#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "nanoesn/reservoir.hpp"

namespace nanoesn {

/// Per-step Gaussian jitter on n randomly chosen nonzero reservoir weights.
struct VariationModel {
    int n = 1;
    double sigma = 0.1;
    std::uint64_t seed = 0;
};

/// Linear (column-major) index into W_res and the offset added there.
using WeightOffset = std::pair<Eigen::Index, double>;

/// The offsets applied at step t. Positions are drawn without replacement
/// from `nonzero`; the draw depends only on (model.seed, t).
std::vector<WeightOffset> draw_offsets(const std::vector<Eigen::Index>& nonzero,
                                       const VariationModel& model, Eigen::Index t);

std::vector<Eigen::Index> nonzero_positions(const Eigen::MatrixXd& m);

/// Copy of `base` with this step's offsets applied. Offsets never accumulate:
/// each step starts again from `base`.
Eigen::MatrixXd noisy_weights(const Eigen::MatrixXd& base, const VariationModel& model,
                              Eigen::Index t);

/// Produces the same matrices as noisy_weights but reuses one buffer,
/// undoing the previous step's offsets instead of copying the base.
class NoisyWeightSource {
public:
    NoisyWeightSource(const Eigen::MatrixXd& base, const VariationModel& model);

    const Eigen::MatrixXd& at(Eigen::Index t);
    WeightSchedule schedule();

private:
    Eigen::MatrixXd base_;
    Eigen::MatrixXd current_;
    VariationModel model_;
    std::vector<Eigen::Index> nonzero_;
    std::vector<WeightOffset> applied_;
};

struct FaultEvent {
    int m = 0;
    Eigen::Index t_fail = 0;
    std::vector<Eigen::Index> victims;
};

/// Picks m distinct victims uniformly among all n_nodes.
FaultEvent resolve_fault(int m, Eigen::Index t_fail, Eigen::Index n_nodes, std::uint64_t seed);

/// Disconnects every victim: its W_res row and column, its input weights and
/// its state entry become zero. Readouts are not touched.
void apply_fault(Network& net, const FaultEvent& event);

} // namespace nanoesn
