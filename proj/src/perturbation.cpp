#include "nanoesn/perturbation.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace nanoesn {

std::vector<Eigen::Index> nonzero_positions(const Eigen::MatrixXd& m)
{
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < m.size(); ++i)
        if (m.data()[i] != 0.0)
            idx.push_back(i);
    return idx;
}

std::vector<WeightOffset> draw_offsets(const std::vector<Eigen::Index>& nonzero,
                                       const VariationModel& model, Eigen::Index t)
{
    if (model.n < 0 || model.sigma < 0.0)
        throw std::invalid_argument("variation model: n and sigma must be non-negative");
    const auto n = static_cast<std::size_t>(model.n);
    if (n > nonzero.size())
        throw std::invalid_argument("variation model: n exceeds the number of nonzero reservoir weights");

    Rng rng(derive_seed(model.seed, {static_cast<std::uint64_t>(t)}));
    std::vector<std::size_t> picks;
    picks.reserve(n);
    if (2 * n <= nonzero.size()) {
        std::uniform_int_distribution<std::size_t> pick(0, nonzero.size() - 1);
        while (picks.size() < n) {
            const std::size_t c = pick(rng);
            if (std::find(picks.begin(), picks.end(), c) == picks.end())
                picks.push_back(c);
        }
    } else {
        std::vector<std::size_t> all(nonzero.size());
        std::iota(all.begin(), all.end(), std::size_t{0});
        for (std::size_t i = 0; i < n; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, all.size() - 1);
            std::swap(all[i], all[pick(rng)]);
        }
        picks.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n));
    }

    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<WeightOffset> out;
    out.reserve(n);
    for (std::size_t p : picks)
        out.emplace_back(nonzero[p], model.sigma * noise(rng));
    return out;
}

Eigen::MatrixXd noisy_weights(const Eigen::MatrixXd& base, const VariationModel& model,
                              Eigen::Index t)
{
    Eigen::MatrixXd w = base;
    for (const auto& [pos, delta] : draw_offsets(nonzero_positions(base), model, t))
        w.data()[pos] += delta;
    return w;
}

NoisyWeightSource::NoisyWeightSource(const Eigen::MatrixXd& base, const VariationModel& model)
    : base_(base), current_(base), model_(model), nonzero_(nonzero_positions(base))
{
    if (static_cast<std::size_t>(model.n) > nonzero_.size())
        throw std::invalid_argument("variation model: n exceeds the number of nonzero reservoir weights");
}

const Eigen::MatrixXd& NoisyWeightSource::at(Eigen::Index t)
{
    for (const auto& [pos, delta] : applied_)
        current_.data()[pos] = base_.data()[pos];
    applied_ = draw_offsets(nonzero_, model_, t);
    for (const auto& [pos, delta] : applied_)
        current_.data()[pos] += delta;
    return current_;
}

WeightSchedule NoisyWeightSource::schedule()
{
    return [this](Eigen::Index t) { return &at(t); };
}

FaultEvent resolve_fault(int m, Eigen::Index t_fail, Eigen::Index n_nodes, std::uint64_t seed)
{
    if (m < 0 || m > n_nodes)
        throw std::invalid_argument("fault event: m must lie in [0, N]");
    FaultEvent ev;
    ev.m = m;
    ev.t_fail = t_fail;
    std::vector<Eigen::Index> all(static_cast<std::size_t>(n_nodes));
    std::iota(all.begin(), all.end(), Eigen::Index{0});
    Rng rng(seed);
    std::sample(all.begin(), all.end(), std::back_inserter(ev.victims), m, rng);
    return ev;
}

void apply_fault(Network& net, const FaultEvent& event)
{
    for (Eigen::Index i : event.victims) {
        if (i < 0 || i >= net.size())
            throw std::invalid_argument("apply_fault: victim index out of range");
        net.w_res.row(i).setZero();
        net.w_res.col(i).setZero();
        net.w_in.row(i).setZero();
        net.state[i] = 0.0;
    }
}

} // namespace nanoesn
