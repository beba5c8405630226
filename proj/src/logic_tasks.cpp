#include "nanoesn/logic_tasks.hpp"

#include <array>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace nanoesn {

namespace {

struct KindName {
    TaskKind kind;
    std::string_view name;
};

constexpr std::array<KindName, 12> kKindNames{{
    {TaskKind::And, "AND"},
    {TaskKind::Nand, "NAND"},
    {TaskKind::Or, "OR"},
    {TaskKind::Nor, "NOR"},
    {TaskKind::Xor, "XOR"},
    {TaskKind::Xnor, "XNOR"},
    {TaskKind::Adder2, "Adder2"},
    {TaskKind::Multiplier2, "Multiplier2"},
    {TaskKind::SixGateBundle, "SixGateBundle"},
    {TaskKind::AdderMultiplier2, "AdderMultiplier2"},
    {TaskKind::Adder1, "Adder1"},
    {TaskKind::Zero, "Zero"},
}};

constexpr std::array<TaskKind, 6> kBundle{TaskKind::Or,  TaskKind::And,  TaskKind::Xor,
                                          TaskKind::Nor, TaskKind::Nand, TaskKind::Xnor};

} // namespace

std::string_view to_string(TaskKind k)
{
    for (const auto& kn : kKindNames)
        if (kn.kind == k)
            return kn.name;
    return "?";
}

TaskKind parse_task_kind(std::string_view s)
{
    for (const auto& kn : kKindNames)
        if (kn.name == s)
            return kn.kind;
    throw std::invalid_argument("unknown task kind '" + std::string(s) + "'");
}

int TaskSpec::n_inputs() const
{
    switch (kind) {
    case TaskKind::Adder2:
    case TaskKind::Multiplier2:
    case TaskKind::AdderMultiplier2:
        return 4;
    case TaskKind::Adder1:
        return 2;
    default:
        return k;
    }
}

int TaskSpec::n_outputs() const
{
    switch (kind) {
    case TaskKind::Adder2: return 3;
    case TaskKind::Multiplier2: return 4;
    case TaskKind::AdderMultiplier2: return 7;
    case TaskKind::Adder1: return 2;
    case TaskKind::SixGateBundle: return 6;
    default: return 1;
    }
}

void TaskSpec::validate() const
{
    if (is_gate(kind) && (k < 2 || k > 10))
        throw std::invalid_argument("task: gate tasks need 2 <= k <= 10");
    if (length < 1)
        throw std::invalid_argument("task: stream length must be >= 1");
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("task: p must lie in [0, 1]");
}

std::uint8_t gate_value(TaskKind gate, const std::uint8_t* bits, int k)
{
    int ones = 0;
    for (int i = 0; i < k; ++i)
        ones += bits[i] ? 1 : 0;
    switch (gate) {
    case TaskKind::And: return ones == k;
    case TaskKind::Nand: return ones != k;
    case TaskKind::Or: return ones > 0;
    case TaskKind::Nor: return ones == 0;
    case TaskKind::Xor: return ones % 2;
    case TaskKind::Xnor: return 1 - ones % 2;
    case TaskKind::Zero: return 0;
    default: throw std::invalid_argument("gate_value: not a single-output gate");
    }
}

BitMatrix compute_targets(TaskKind kind, const BitMatrix& inputs)
{
    TaskSpec shape;
    shape.kind = kind;
    shape.k = static_cast<int>(inputs.cols());
    if (shape.n_inputs() != inputs.cols())
        throw std::invalid_argument("compute_targets: wrong input width for " + std::string(to_string(kind)));

    const Eigen::Index rows = inputs.rows();
    const int k = static_cast<int>(inputs.cols());
    BitMatrix targets(rows, shape.n_outputs());
    std::vector<std::uint8_t> row(static_cast<std::size_t>(k));
    for (Eigen::Index t = 0; t < rows; ++t) {
        for (int j = 0; j < k; ++j)
            row[static_cast<std::size_t>(j)] = inputs(t, j);
        const auto bit = [&](int j) { return static_cast<unsigned>(row[static_cast<std::size_t>(j)]); };
        switch (kind) {
        case TaskKind::SixGateBundle:
            for (std::size_t g = 0; g < kBundle.size(); ++g)
                targets(t, static_cast<Eigen::Index>(g)) = gate_value(kBundle[g], row.data(), k);
            break;
        case TaskKind::Adder1:
            targets(t, 0) = static_cast<std::uint8_t>(bit(0) ^ bit(1));
            targets(t, 1) = static_cast<std::uint8_t>(bit(0) & bit(1));
            break;
        case TaskKind::Adder2:
        case TaskKind::Multiplier2:
        case TaskKind::AdderMultiplier2: {
            const unsigned a = 2 * bit(1) + bit(0);
            const unsigned b = 2 * bit(3) + bit(2);
            Eigen::Index col = 0;
            if (kind != TaskKind::Multiplier2)
                for (int i = 0; i < 3; ++i)
                    targets(t, col++) = static_cast<std::uint8_t>(((a + b) >> i) & 1U);
            if (kind != TaskKind::Adder2)
                for (int i = 0; i < 4; ++i)
                    targets(t, col++) = static_cast<std::uint8_t>(((a * b) >> i) & 1U);
            break;
        }
        default:
            targets(t, 0) = gate_value(kind, row.data(), k);
        }
    }
    return targets;
}

BitStreams generate_streams(const TaskSpec& spec)
{
    spec.validate();
    Rng rng(spec.seed);
    std::bernoulli_distribution bit(spec.p);
    BitStreams s;
    s.inputs.resize(spec.length, spec.n_inputs());
    for (Eigen::Index t = 0; t < s.inputs.rows(); ++t)
        for (Eigen::Index j = 0; j < s.inputs.cols(); ++j)
            s.inputs(t, j) = bit(rng) ? 1 : 0;
    s.targets = compute_targets(spec.kind, s.inputs);
    return s;
}

double evaluate_accuracy(const BitMatrix& predicted, const BitMatrix& target)
{
    if (predicted.rows() != target.rows() || predicted.cols() != target.cols())
        throw std::invalid_argument("evaluate_accuracy: shape mismatch");
    if (predicted.rows() == 0)
        throw std::invalid_argument("evaluate_accuracy: no rows");
    Eigen::Index correct = 0;
    for (Eigen::Index t = 0; t < predicted.rows(); ++t)
        if (predicted.row(t) == target.row(t))
            ++correct;
    return static_cast<double>(correct) / static_cast<double>(predicted.rows());
}

void write_streams_csv(std::ostream& os, const BitStreams& streams)
{
    const Eigen::Index k = streams.inputs.cols();
    const Eigen::Index n = streams.targets.cols();
    for (Eigen::Index j = 0; j < k; ++j)
        os << (j ? "," : "") << 'u' << j;
    for (Eigen::Index j = 0; j < n; ++j)
        os << ',' << 'y' << j;
    os << '\n';
    for (Eigen::Index t = 0; t < streams.inputs.rows(); ++t) {
        for (Eigen::Index j = 0; j < k; ++j)
            os << (j ? "," : "") << int(streams.inputs(t, j));
        for (Eigen::Index j = 0; j < n; ++j)
            os << ',' << int(streams.targets(t, j));
        os << '\n';
    }
}

BitStreams read_streams_csv(std::istream& is, int n_inputs)
{
    std::string line;
    if (!std::getline(is, line))
        throw std::runtime_error("stream CSV: missing header");
    std::vector<std::vector<std::uint8_t>> rows;
    std::size_t width = 0;
    while (std::getline(is, line)) {
        if (line.empty())
            continue;
        std::vector<std::uint8_t> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            if (cell != "0" && cell != "1")
                throw std::runtime_error("stream CSV: non-bit cell '" + cell + "'");
            row.push_back(cell == "1" ? 1 : 0);
        }
        if (width == 0)
            width = row.size();
        if (row.size() != width || width < static_cast<std::size_t>(n_inputs))
            throw std::runtime_error("stream CSV: ragged or too-narrow row");
        rows.push_back(std::move(row));
    }
    BitStreams s;
    const auto k = static_cast<Eigen::Index>(n_inputs);
    s.inputs.resize(static_cast<Eigen::Index>(rows.size()), k);
    s.targets.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width) - k);
    for (std::size_t t = 0; t < rows.size(); ++t)
        for (std::size_t j = 0; j < width; ++j) {
            const auto jj = static_cast<Eigen::Index>(j);
            const auto tt = static_cast<Eigen::Index>(t);
            if (jj < k)
                s.inputs(tt, jj) = rows[t][j];
            else
                s.targets(tt, jj - k) = rows[t][j];
        }
    return s;
}

} // namespace nanoesn
