#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "nanoesn/driver.hpp"
#include "nanoesn/logic_tasks.hpp"
#include "nanoesn/perturbation.hpp"
#include "nanoesn/readout.hpp"

namespace nanoesn {

/// Stored teacher streams for every terminal. Column sets pick the main and
/// auxiliary terminals out of the stored matrices.
struct TeacherMemory {
    BitMatrix stored_inputs;  // T x (k_main + k_aux)
    BitMatrix stored_targets; // T x (n_main + n_aux)
    std::vector<Eigen::Index> main_inputs;
    std::vector<Eigen::Index> aux_inputs;
    std::vector<Eigen::Index> main_outputs;
    std::vector<Eigen::Index> aux_outputs;

    /// Throws std::invalid_argument if index sets overlap, fall outside the
    /// stored matrices, or leave a column unassigned.
    void validate() const;
};

enum class TeacherMode { Monitoring, Faulted, Retraining, Restored };

std::string_view to_string(TeacherMode m);

struct Mismatch {
    Eigen::Index step = 0;
    std::uint8_t expected = 0;
    std::uint8_t observed = 0;
};

/// Supervises one network through its auxiliary output. Never touches the
/// reservoir weights; retraining only replaces the readout bank.
class Teacher {
public:
    Teacher(TeacherMemory memory, Eigen::Index washout = 10, int debounce = 1);

    TeacherMode mode() const noexcept { return mode_; }
    const std::vector<Mismatch>& mismatch_log() const noexcept { return log_; }
    int retrain_count() const noexcept { return retrain_count_; }
    const TeacherMemory& memory() const noexcept { return memory_; }

    /// Compares one auxiliary bit. `debounce` consecutive mismatches move
    /// Monitoring to Faulted; other modes ignore the call.
    TeacherMode monitor_step(std::uint8_t observed, std::uint8_t expected, Eigen::Index t);

    /// Stored auxiliary input/target at step t of the cyclic replay.
    Eigen::VectorXd aux_input(Eigen::Index t) const;
    std::uint8_t aux_expected(Eigen::Index t, Eigen::Index output = 0) const;

    /// Fits the full readout bank on the stored streams. No mode change.
    Fit fit(Network& net, const ReadoutParams& params, const VisibleMask& mask,
            const WeightSchedule& schedule = {}) const;

    /// Faulted -> Retraining -> Restored. On failure the mode returns to Faulted.
    Fit retrain(Network& net, const ReadoutParams& params, const VisibleMask& mask,
                const WeightSchedule& schedule = {});

    /// Restored -> Monitoring.
    void resume();

private:
    TeacherMemory memory_;
    Eigen::Index washout_;
    int debounce_;
    int consecutive_ = 0;
    TeacherMode mode_ = TeacherMode::Monitoring;
    std::vector<Mismatch> log_;
    int retrain_count_ = 0;
};

/// k_main main inputs feeding one `main` gate and k_aux auxiliary inputs
/// feeding one `aux` gate; inputs are laid out main first.
TeacherMemory gate_teacher_memory(TaskKind main, int k_main, TaskKind aux, int k_aux,
                                  Eigen::Index length, std::uint64_t seed);

/// Two main inputs -> main NAND, two auxiliary inputs -> auxiliary NAND.
TeacherMemory nand_teacher_memory(Eigen::Index length, std::uint64_t seed);

struct RecoveryConfig {
    NetworkConfig network;  // n_inputs/n_outputs are set from the teacher memory
    ReadoutParams readout;
    TaskKind main_task = TaskKind::Nand;
    int main_inputs = 2;
    TaskKind aux_task = TaskKind::Nand;
    int aux_inputs = 2;
    Eigen::Index length = 1000;
    Eigen::Index t_fail = 700;
    Eigen::Index washout = 10;
    int debounce = 1;
    std::optional<VariationModel> variation;
    std::uint64_t master_seed = 0;
};

RecoveryConfig default_recovery_config();

struct RecoveryRecord {
    int m = 0;
    int repeat = 0;
    bool detected = false;
    Eigen::Index detect_latency = -1;
    int false_alarms = 0;
    double pre_fault_accuracy = 0.0;  // main output on the stored streams
    double post_retrain_train_accuracy = 0.0;
    double post_retrain_accuracy = 0.0;  // main output on a fresh stream
    bool post_retrain_perfect = false;
};

struct RecoveryStats {
    int m = 0;
    std::vector<RecoveryRecord> records;
    double detection_rate = 0.0;
    double post_retrain_lp = 0.0;
};

/// Train, operate, inject m faults at t_fail, detect through the auxiliary
/// channel, retrain, and score the main output; `repeats` times.
RecoveryStats run_recovery_experiment(const RecoveryConfig& config, int m, int repeats,
                                      unsigned threads = 0);

/// Columns: m,repeat,detected,detect_latency_steps,post_retrain_accuracy,post_retrain_perfect
void write_recovery_csv(std::ostream& os, std::span<const RecoveryStats> stats);

} // namespace nanoesn
