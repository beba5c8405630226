#include "nanoesn/teacher.hpp"

#include <algorithm>
#include <memory>
#include <ostream>
#include <set>
#include <stdexcept>

#include "nanoesn/experiment.hpp"
#include "nanoesn/logic_tasks.hpp"

namespace nanoesn {

std::string_view to_string(TeacherMode m)
{
    switch (m) {
    case TeacherMode::Monitoring: return "Monitoring";
    case TeacherMode::Faulted: return "Faulted";
    case TeacherMode::Retraining: return "Retraining";
    case TeacherMode::Restored: return "Restored";
    }
    return "?";
}

namespace {

void check_partition(const std::vector<Eigen::Index>& a, const std::vector<Eigen::Index>& b,
                     Eigen::Index width, const char* what)
{
    std::set<Eigen::Index> seen;
    for (const auto* set : {&a, &b})
        for (Eigen::Index i : *set) {
            if (i < 0 || i >= width)
                throw std::invalid_argument(std::string("teacher memory: ") + what + " index out of range");
            if (!seen.insert(i).second)
                throw std::invalid_argument(std::string("teacher memory: ") + what + " index sets overlap");
        }
    if (static_cast<Eigen::Index>(seen.size()) != width)
        throw std::invalid_argument(std::string("teacher memory: unassigned ") + what + " column");
}

} // namespace

void TeacherMemory::validate() const
{
    if (stored_inputs.rows() != stored_targets.rows() || stored_inputs.rows() == 0)
        throw std::invalid_argument("teacher memory: stored streams must be non-empty and equally long");
    check_partition(main_inputs, aux_inputs, stored_inputs.cols(), "input");
    check_partition(main_outputs, aux_outputs, stored_targets.cols(), "output");
    if (aux_outputs.empty())
        throw std::invalid_argument("teacher memory: needs an auxiliary output");
}

Teacher::Teacher(TeacherMemory memory, Eigen::Index washout, int debounce)
    : memory_(std::move(memory)), washout_(washout), debounce_(debounce)
{
    memory_.validate();
    if (debounce_ < 1)
        throw std::invalid_argument("teacher: debounce window must be >= 1");
}

TeacherMode Teacher::monitor_step(std::uint8_t observed, std::uint8_t expected, Eigen::Index t)
{
    if (mode_ != TeacherMode::Monitoring)
        return mode_;
    if (observed == expected) {
        consecutive_ = 0;
        return mode_;
    }
    log_.push_back({t, expected, observed});
    if (++consecutive_ >= debounce_)
        mode_ = TeacherMode::Faulted;
    return mode_;
}

Eigen::VectorXd Teacher::aux_input(Eigen::Index t) const
{
    const Eigen::Index row = t % memory_.stored_inputs.rows();
    Eigen::VectorXd u(static_cast<Eigen::Index>(memory_.aux_inputs.size()));
    for (std::size_t j = 0; j < memory_.aux_inputs.size(); ++j)
        u[static_cast<Eigen::Index>(j)] = memory_.stored_inputs(row, memory_.aux_inputs[j]);
    return u;
}

std::uint8_t Teacher::aux_expected(Eigen::Index t, Eigen::Index output) const
{
    const Eigen::Index row = t % memory_.stored_targets.rows();
    return memory_.stored_targets(row, memory_.aux_outputs.at(static_cast<std::size_t>(output)));
}

Fit Teacher::fit(Network& net, const ReadoutParams& params, const VisibleMask& mask,
                 const WeightSchedule& schedule) const
{
    return fit_readout(net, memory_.stored_inputs, memory_.stored_targets, params, mask, washout_,
                       schedule);
}

Fit Teacher::retrain(Network& net, const ReadoutParams& params, const VisibleMask& mask,
                     const WeightSchedule& schedule)
{
    if (mode_ != TeacherMode::Faulted)
        throw std::logic_error("teacher: retrain requires the Faulted mode");
    mode_ = TeacherMode::Retraining;
    try {
        Fit f = fit(net, params, mask, schedule);
        ++retrain_count_;
        consecutive_ = 0;
        mode_ = TeacherMode::Restored;
        return f;
    } catch (...) {
        mode_ = TeacherMode::Faulted;
        throw;
    }
}

void Teacher::resume()
{
    if (mode_ != TeacherMode::Restored)
        throw std::logic_error("teacher: resume requires the Restored mode");
    mode_ = TeacherMode::Monitoring;
}

TeacherMemory gate_teacher_memory(TaskKind main, int k_main, TaskKind aux, int k_aux,
                                  Eigen::Index length, std::uint64_t seed)
{
    if (k_main < 1 || k_aux < 1)
        throw std::invalid_argument("teacher memory: need at least one main and one auxiliary input");
    TaskSpec spec;
    spec.kind = TaskKind::Zero;
    spec.k = k_main + k_aux;
    spec.length = length;
    spec.seed = seed;
    TeacherMemory mem;
    mem.stored_inputs = generate_streams(spec).inputs;
    mem.stored_targets.resize(length, 2);
    mem.stored_targets.col(0) = compute_targets(main, mem.stored_inputs.leftCols(k_main));
    mem.stored_targets.col(1) = compute_targets(aux, mem.stored_inputs.rightCols(k_aux));
    for (int j = 0; j < k_main; ++j)
        mem.main_inputs.push_back(j);
    for (int j = 0; j < k_aux; ++j)
        mem.aux_inputs.push_back(k_main + j);
    mem.main_outputs = {0};
    mem.aux_outputs = {1};
    return mem;
}

TeacherMemory nand_teacher_memory(Eigen::Index length, std::uint64_t seed)
{
    return gate_teacher_memory(TaskKind::Nand, 2, TaskKind::Nand, 2, length, seed);
}

RecoveryConfig default_recovery_config()
{
    RecoveryConfig c;
    c.network = default_setup().network;
    c.readout = ReadoutParams{};
    return c;
}

namespace {

/// Main-terminal stream with the auxiliary terminals replaying the memory.
BitStreams operating_stream(const TeacherMemory& mem, TaskKind main_task, Eigen::Index length,
                            std::uint64_t seed)
{
    TaskSpec spec;
    spec.kind = TaskKind::Zero;
    spec.k = static_cast<int>(mem.main_inputs.size());
    spec.length = length;
    spec.seed = seed;
    const BitStreams main = generate_streams(spec);

    BitStreams s;
    s.inputs.resize(length, mem.stored_inputs.cols());
    s.targets.resize(length, mem.stored_targets.cols());
    const Eigen::Index period = mem.stored_inputs.rows();
    for (Eigen::Index t = 0; t < length; ++t) {
        for (std::size_t j = 0; j < mem.main_inputs.size(); ++j)
            s.inputs(t, mem.main_inputs[j]) = main.inputs(t, static_cast<Eigen::Index>(j));
        for (Eigen::Index j : mem.aux_inputs)
            s.inputs(t, j) = mem.stored_inputs(t % period, j);
        for (Eigen::Index j : mem.aux_outputs)
            s.targets(t, j) = mem.stored_targets(t % period, j);
    }
    const BitMatrix main_targets = compute_targets(main_task, s.inputs(Eigen::all, mem.main_inputs));
    for (std::size_t j = 0; j < mem.main_outputs.size(); ++j)
        s.targets.col(mem.main_outputs[j]) = main_targets.col(0);
    return s;
}

struct NoisePhase {
    std::optional<NoisyWeightSource> source;
    WeightSchedule schedule;

    NoisePhase(const std::optional<VariationModel>& model, const Eigen::MatrixXd& base,
               std::uint64_t phase)
    {
        if (!model)
            return;
        VariationModel m = *model;
        m.seed = derive_seed(model->seed, {phase});
        source.emplace(base, m);
        schedule = source->schedule();
    }
    const Eigen::MatrixXd* at(Eigen::Index t) { return source ? &source->at(t) : nullptr; }
};

RecoveryRecord run_repeat(const RecoveryConfig& cfg, int m, int repeat)
{
    const std::uint64_t rs = derive_seed(cfg.master_seed, {static_cast<std::uint64_t>(repeat)});
    RecoveryRecord rec;
    rec.m = m;
    rec.repeat = repeat;

    Teacher teacher(gate_teacher_memory(cfg.main_task, cfg.main_inputs, cfg.aux_task, cfg.aux_inputs,
                                        cfg.length, derive_seed(rs, Stream::TrainInputs)),
                    cfg.washout, cfg.debounce);
    const TeacherMemory& mem = teacher.memory();

    NetworkConfig nc = cfg.network;
    nc.n_inputs = static_cast<int>(mem.stored_inputs.cols());
    nc.n_outputs = static_cast<int>(mem.stored_targets.cols());
    nc.seed = derive_seed(rs, Stream::Network);
    Network net = build_network(nc);
    Rng mask_rng(derive_seed(nc.seed, Stream::ReadoutMask));
    const VisibleMask mask = draw_visible_mask(net.size(), nc.delta_out, mask_rng);

    std::optional<VariationModel> variation = cfg.variation;
    if (variation)
        variation->seed = derive_seed(rs, Stream::Noise);

    // Noise streams are keyed by phase; the base matrix is re-read after a
    // fault so the jitter acts on the faulted device.
    Readout readout;
    {
        NoisePhase noise(variation, net.w_res, 0);
        Fit f = teacher.fit(net, cfg.readout, mask, noise.schedule);
        rec.pre_fault_accuracy = trajectory_accuracy(f.readout, f.trajectory, mem.stored_targets,
                                                     mem.main_outputs);
        readout = std::move(f.readout);
    }

    const FaultEvent fault = resolve_fault(m, cfg.t_fail, net.size(),
                                           derive_seed(rs, {static_cast<std::uint64_t>(Stream::Fault),
                                                            static_cast<std::uint64_t>(m)}));
    const BitStreams operating = operating_stream(mem, cfg.main_task, cfg.length, derive_seed(rs, Stream::TestInputs));
    const Eigen::Index aux_col = mem.aux_outputs.front();
    const Eigen::Index n = net.size();

    auto noise = std::make_unique<NoisePhase>(variation, net.w_res, 1);
    bool faulted = false;
    Eigen::Index monitor_from = cfg.washout;
    std::uint64_t phase = 2;
    net.reset_state();
    for (Eigen::Index t = 0; t < cfg.length; ++t) {
        if (t == cfg.t_fail && m > 0) {
            apply_fault(net, fault);
            noise = std::make_unique<NoisePhase>(variation, net.w_res, phase++);
            faulted = true;
        }
        step(net, operating.inputs.row(t).cast<double>().transpose(), noise->at(t));
        const Eigen::Index s = t + 1 - readout.tau;
        if (t < monitor_from || s < 0)
            continue;
        const double y = readout.w_out.row(aux_col).head(n).dot(net.state) + readout.w_out(aux_col, n);
        const std::uint8_t observed = y >= readout.theta ? 1 : 0;
        if (teacher.monitor_step(observed, operating.targets(s, aux_col), t) != TeacherMode::Faulted)
            continue;
        if (faulted) {
            rec.detected = true;
            rec.detect_latency = t - cfg.t_fail;
            break;
        }
        // Spurious trigger on a healthy device: retrain and carry on.
        ++rec.false_alarms;
        NoisePhase retrain_noise(variation, net.w_res, phase++);
        readout = teacher.retrain(net, cfg.readout, mask, retrain_noise.schedule).readout;
        teacher.resume();
        net.reset_state();
        monitor_from = t + 1 + cfg.washout;
    }

    if (rec.detected) {
        NoisePhase retrain_noise(variation, net.w_res, phase++);
        Fit f = teacher.retrain(net, cfg.readout, mask, retrain_noise.schedule);
        teacher.resume();
        rec.post_retrain_train_accuracy =
            trajectory_accuracy(f.readout, f.trajectory, mem.stored_targets, mem.main_outputs);
        readout = std::move(f.readout);
    } else {
        NoisePhase replay_noise(variation, net.w_res, phase++);
        rec.post_retrain_train_accuracy =
            replay_accuracy(net, readout, mem.stored_inputs, mem.stored_targets, cfg.washout,
                            replay_noise.schedule, mem.main_outputs);
    }

    const BitStreams eval = operating_stream(
        mem, cfg.main_task, cfg.length,
        derive_seed(rs, {static_cast<std::uint64_t>(Stream::TestInputs), 1}));
    NoisePhase eval_noise(variation, net.w_res, phase++);
    rec.post_retrain_accuracy = replay_accuracy(net, readout, eval.inputs, eval.targets, cfg.washout,
                                                eval_noise.schedule, mem.main_outputs);
    rec.post_retrain_perfect =
        rec.post_retrain_train_accuracy == 1.0 && rec.post_retrain_accuracy == 1.0;
    return rec;
}

} // namespace

RecoveryStats run_recovery_experiment(const RecoveryConfig& config, int m, int repeats,
                                      unsigned threads)
{
    if (repeats < 1)
        throw std::invalid_argument("recovery experiment: repeats must be >= 1");
    if (config.t_fail < 0 || config.t_fail >= config.length)
        throw std::invalid_argument("recovery experiment: t_fail must lie inside the operating stream");
    RecoveryStats stats;
    stats.m = m;
    stats.records.resize(static_cast<std::size_t>(repeats));
    parallel_for(stats.records.size(), threads, [&](std::size_t r) {
        stats.records[r] = run_repeat(config, m, static_cast<int>(r));
    });
    int detected = 0;
    int perfect = 0;
    for (const RecoveryRecord& rec : stats.records) {
        detected += rec.detected;
        perfect += rec.post_retrain_perfect;
    }
    stats.detection_rate = m > 0 ? static_cast<double>(detected) / repeats : 0.0;
    stats.post_retrain_lp = static_cast<double>(perfect) / repeats;
    return stats;
}

void write_recovery_csv(std::ostream& os, std::span<const RecoveryStats> stats)
{
    os << "m,repeat,detected,detect_latency_steps,post_retrain_accuracy,post_retrain_perfect\n";
    for (const RecoveryStats& s : stats)
        for (const RecoveryRecord& r : s.records)
            os << r.m << ',' << r.repeat << ',' << int(r.detected) << ',' << r.detect_latency << ','
               << format_number(r.post_retrain_accuracy) << ',' << int(r.post_retrain_perfect) << '\n';
}

} // namespace nanoesn
