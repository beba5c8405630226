#pragma once

#include <cstdint>
#include <iosfwd>
#include <string_view>

#include "nanoesn/readout.hpp"

namespace nanoesn {

/// Combinational Boolean targets. Adder1, AdderMultiplier2 and Zero extend
/// the basic gate set: a 1-bit half adder, the joint 7-output 2-bit
/// adder+multiplier, and the constant-0 function.
enum class TaskKind {
    And,
    Nand,
    Or,
    Nor,
    Xor,
    Xnor,
    Adder2,
    Multiplier2,
    SixGateBundle,
    AdderMultiplier2,
    Adder1,
    Zero,
};

std::string_view to_string(TaskKind k);
TaskKind parse_task_kind(std::string_view s);

constexpr bool is_gate(TaskKind k)
{
    return k == TaskKind::And || k == TaskKind::Nand || k == TaskKind::Or ||
           k == TaskKind::Nor || k == TaskKind::Xor || k == TaskKind::Xnor ||
           k == TaskKind::SixGateBundle || k == TaskKind::Zero;
}

struct TaskSpec {
    TaskKind kind = TaskKind::Nand;
    int k = 2;
    Eigen::Index length = 1000;
    double p = 0.5;
    std::uint64_t seed = 0;

    /// Input width after forcing fixed-width kinds.
    int n_inputs() const;
    int n_outputs() const;
    void validate() const;
};

struct BitStreams {
    BitMatrix inputs;  // T x k
    BitMatrix targets; // T x n_outputs
};

/// Truth value of a k-ary gate. Xor is parity.
std::uint8_t gate_value(TaskKind gate, const std::uint8_t* bits, int k);

/// Row-wise target function applied to an input matrix.
BitMatrix compute_targets(TaskKind kind, const BitMatrix& inputs);

/// i.i.d. Bernoulli(p) inputs and their targets.
BitStreams generate_streams(const TaskSpec& spec);

/// Fraction of rows where every output bit matches.
double evaluate_accuracy(const BitMatrix& predicted, const BitMatrix& target);

/// One row per step: u0..u{k-1}, y0..y{n-1}.
void write_streams_csv(std::ostream& os, const BitStreams& streams);
BitStreams read_streams_csv(std::istream& is, int n_inputs);

} // namespace nanoesn
