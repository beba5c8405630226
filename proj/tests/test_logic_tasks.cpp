#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>

#include "nanoesn/logic_tasks.hpp"

using namespace nanoesn;

namespace {

BitMatrix row(std::initializer_list<int> bits)
{
    BitMatrix m(1, static_cast<Eigen::Index>(bits.size()));
    Eigen::Index j = 0;
    for (int b : bits)
        m(0, j++) = static_cast<std::uint8_t>(b);
    return m;
}

TaskSpec spec(TaskKind kind, int k, Eigen::Index length, std::uint64_t seed)
{
    TaskSpec s;
    s.kind = kind;
    s.k = k;
    s.length = length;
    s.seed = seed;
    return s;
}

} // namespace

TEST_CASE("NAND-2 truth table") {
    CHECK(compute_targets(TaskKind::Nand, row({1, 1}))(0, 0) == 0);
    CHECK(compute_targets(TaskKind::Nand, row({0, 0}))(0, 0) == 1);
    CHECK(compute_targets(TaskKind::Nand, row({0, 1}))(0, 0) == 1);
    CHECK(compute_targets(TaskKind::Nand, row({1, 0}))(0, 0) == 1);
}

TEST_CASE("k-ary gates") {
    const BitMatrix r = row({1, 1, 1, 0, 0});
    CHECK(compute_targets(TaskKind::Xor, r)(0, 0) == 1);
    CHECK(compute_targets(TaskKind::Xnor, r)(0, 0) == 0);
    CHECK(compute_targets(TaskKind::And, r)(0, 0) == 0);
    CHECK(compute_targets(TaskKind::Or, r)(0, 0) == 1);
    CHECK(compute_targets(TaskKind::Nor, row({0, 0, 0}))(0, 0) == 1);
    CHECK(compute_targets(TaskKind::And, row({1, 1, 1}))(0, 0) == 1);
    CHECK(compute_targets(TaskKind::Zero, row({1, 1, 1}))(0, 0) == 0);
}

TEST_CASE("six-gate bundle order") {
    CHECK(compute_targets(TaskKind::SixGateBundle, row({1, 0, 1})) == row({1, 0, 0, 0, 1, 1}));
}

TEST_CASE("adder and multiplier encodings") {
    // a = 3 from (b0, b1) = (1, 1); b = 2 from (b2, b3) = (0, 1)
    const BitMatrix in = row({1, 1, 0, 1});
    CHECK(compute_targets(TaskKind::Adder2, in) == row({1, 0, 1}));
    CHECK(compute_targets(TaskKind::Multiplier2, in) == row({0, 1, 1, 0}));
    CHECK(compute_targets(TaskKind::AdderMultiplier2, in) == row({1, 0, 1, 0, 1, 1, 0}));
    CHECK(compute_targets(TaskKind::Adder1, row({1, 1})) == row({0, 1}));
}

TEST_CASE("adder and multiplier round-trip every operand pair") {
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            const BitMatrix in = row({a & 1, a >> 1, b & 1, b >> 1});
            const BitMatrix sum = compute_targets(TaskKind::Adder2, in);
            const BitMatrix prod = compute_targets(TaskKind::Multiplier2, in);
            int s = 0, p = 0;
            for (Eigen::Index i = 0; i < sum.cols(); ++i)
                s += sum(0, i) << i;
            for (Eigen::Index i = 0; i < prod.cols(); ++i)
                p += prod(0, i) << i;
            CHECK(s == a + b);
            CHECK(p == a * b);
        }
}

TEST_CASE("k-ary XOR is a fold of binary XOR") {
    const BitStreams s = generate_streams(spec(TaskKind::Xor, 7, 500, 9));
    for (Eigen::Index t = 0; t < s.inputs.rows(); ++t) {
        std::uint8_t acc = s.inputs(t, 0);
        for (Eigen::Index j = 1; j < 7; ++j) {
            const std::uint8_t pair[2] = {acc, s.inputs(t, j)};
            acc = gate_value(TaskKind::Xor, pair, 2);
        }
        CHECK(s.targets(t, 0) == acc);
    }
}

TEST_CASE("targets are a pure function of the current row") {
    const BitStreams s = generate_streams(spec(TaskKind::SixGateBundle, 4, 300, 2));
    for (Eigen::Index t = 0; t < s.inputs.rows(); ++t)
        CHECK(compute_targets(TaskKind::SixGateBundle, BitMatrix(s.inputs.row(t))) == BitMatrix(s.targets.row(t)));
}

TEST_CASE("stream shapes and reproducibility") {
    const BitStreams a = generate_streams(spec(TaskKind::Nand, 5, 1000, 42));
    const BitStreams b = generate_streams(spec(TaskKind::Nand, 5, 1000, 42));
    const BitStreams c = generate_streams(spec(TaskKind::Nand, 5, 1000, 43));
    CHECK(a.inputs.rows() == 1000);
    CHECK(a.inputs.cols() == 5);
    CHECK(a.targets.cols() == 1);
    CHECK(a.inputs == b.inputs);
    CHECK(a.targets == b.targets);
    CHECK(a.inputs != c.inputs);
    CHECK((a.inputs.array() <= 1).all());
}

TEST_CASE("fixed-width kinds force their input count") {
    const BitStreams s = generate_streams(spec(TaskKind::AdderMultiplier2, 2, 10, 1));
    CHECK(s.inputs.cols() == 4);
    CHECK(s.targets.cols() == 7);
    CHECK(spec(TaskKind::Adder1, 9, 10, 1).n_inputs() == 2);
    CHECK(spec(TaskKind::Adder1, 9, 10, 1).n_outputs() == 2);
}

TEST_CASE("input mean stays near p") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const BitStreams s = generate_streams(spec(TaskKind::Nand, 1 + 2, 1000, seed));
        for (Eigen::Index j = 0; j < s.inputs.cols(); ++j) {
            const double mean = s.inputs.col(j).cast<double>().mean();
            CHECK(mean == doctest::Approx(0.5).epsilon(0.1));
        }
    }
}

TEST_CASE("invalid task specs are rejected") {
    CHECK_THROWS(spec(TaskKind::Nand, 1, 10, 0).validate());
    CHECK_THROWS(spec(TaskKind::Nand, 11, 10, 0).validate());
    CHECK_THROWS(spec(TaskKind::Nand, 2, 0, 0).validate());
    TaskSpec bad = spec(TaskKind::Nand, 2, 10, 0);
    bad.p = 1.5;
    CHECK_THROWS(bad.validate());
    CHECK_NOTHROW(spec(TaskKind::Adder2, 1, 10, 0).validate());
}

TEST_CASE("task names round-trip") {
    for (TaskKind k : {TaskKind::And, TaskKind::Nand, TaskKind::Or, TaskKind::Nor, TaskKind::Xor,
                       TaskKind::Xnor, TaskKind::Adder2, TaskKind::Multiplier2, TaskKind::SixGateBundle,
                       TaskKind::AdderMultiplier2, TaskKind::Adder1, TaskKind::Zero})
        CHECK(parse_task_kind(to_string(k)) == k);
    CHECK_THROWS(parse_task_kind("MAJORITY"));
}

TEST_SUITE("accuracy") {
    TEST_CASE("identical matrices") {
        const BitStreams s = generate_streams(spec(TaskKind::SixGateBundle, 3, 50, 5));
        CHECK(evaluate_accuracy(s.targets, s.targets) == 1.0);
    }

    TEST_CASE("one wrong row out of ten") {
        BitMatrix target = BitMatrix::Zero(10, 1);
        BitMatrix predicted = target;
        predicted(4, 0) = 1;
        CHECK(evaluate_accuracy(predicted, target) == doctest::Approx(0.9));
    }

    TEST_CASE("any differing bit fails the row") {
        CHECK(evaluate_accuracy(row({1, 0, 1}), row({1, 0, 0})) == 0.0);
    }

    TEST_CASE("shape mismatch throws") {
        CHECK_THROWS(evaluate_accuracy(BitMatrix::Zero(3, 1), BitMatrix::Zero(3, 2)));
        CHECK_THROWS(evaluate_accuracy(BitMatrix::Zero(3, 1), BitMatrix::Zero(4, 1)));
    }
}

TEST_CASE("CSV round trip") {
    const BitStreams s = generate_streams(spec(TaskKind::Adder2, 4, 40, 8));
    std::stringstream ss;
    write_streams_csv(ss, s);
    std::string header;
    std::getline(std::stringstream(ss.str()), header);
    CHECK(header == "u0,u1,u2,u3,y0,y1,y2");
    const BitStreams back = read_streams_csv(ss, 4);
    CHECK(back.inputs == s.inputs);
    CHECK(back.targets == s.targets);
}
