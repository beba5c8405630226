#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "nanoesn/reservoir.hpp"

using namespace nanoesn;

namespace {

NetworkConfig small_config(int n, WeightPattern p, double delta_res, double lambda = 0.5)
{
    NetworkConfig c;
    c.n_nodes = n;
    c.weight_pattern = p;
    c.delta_res = delta_res;
    c.spectral_radius = lambda;
    c.n_inputs = 2;
    c.seed = 42;
    return c;
}

Eigen::MatrixXd mat(std::initializer_list<std::initializer_list<double>> rows)
{
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(rows.begin()->size()));
    Eigen::Index r = 0;
    for (const auto& row : rows) {
        Eigen::Index c = 0;
        for (double v : row)
            m(r, c++) = v;
        ++r;
    }
    return m;
}

} // namespace

TEST_SUITE("spectral radius") {
    TEST_CASE("scalar and permutation matrices") {
        CHECK(spectral_radius(mat({{0.1}})).value == doctest::Approx(0.1).epsilon(1e-12));
        const SpectralEstimate perm = spectral_radius(mat({{0, 1}, {1, 0}}));
        CHECK(perm.converged);
        CHECK(perm.value == doctest::Approx(1.0).epsilon(1e-12));
    }

    TEST_CASE("zero matrix has radius 0") {
        const SpectralEstimate z = spectral_radius(Eigen::MatrixXd::Zero(4, 4));
        CHECK(z.converged);
        CHECK(z.value == 0.0);
    }

    TEST_CASE("matrix built from chosen eigenvalues") {
        // Q diag(0.9, 0.2, 0.1, 0.05, 0.01) Q^-1 with a well-conditioned Q.
        Rng rng(5);
        std::normal_distribution<double> g(0.0, 1.0);
        Eigen::MatrixXd q = Eigen::MatrixXd::Identity(5, 5);
        for (Eigen::Index i = 0; i < q.size(); ++i)
            q.data()[i] += 0.3 * g(rng);
        Eigen::VectorXd ev(5);
        ev << 0.9, 0.2, 0.1, 0.05, 0.01;
        const Eigen::MatrixXd m = q * ev.asDiagonal() * q.inverse();
        const SpectralEstimate est = spectral_radius(m);
        CHECK(est.converged);
        CHECK(std::abs(est.value - 0.9) < 1e-8);
        CHECK(std::abs(spectral_radius_dense(m) - 0.9) < 1e-8);
    }

    TEST_CASE("complex dominant pair is flagged and the dense route recovers it") {
        // eigenvalues +-i; iterates alternate in norm and never settle
        const Eigen::MatrixXd m = mat({{0, -2}, {0.5, 0}});
        const SpectralEstimate est = spectral_radius(m, 1e-10, 200);
        CHECK_FALSE(est.converged);
        CHECK(est.iterations == 200);
        CHECK(spectral_radius_robust(m) == doctest::Approx(1.0).epsilon(1e-12));
    }

    TEST_CASE("non-square input is rejected") {
        CHECK_THROWS_AS(spectral_radius(Eigen::MatrixXd::Zero(2, 3)), std::invalid_argument);
    }
}

TEST_SUITE("build") {
    TEST_CASE("identical dense pattern is all ones before scaling") {
        NetworkConfig c = small_config(3, WeightPattern::Identical, 1.0);
        Rng rng(1);
        const Eigen::MatrixXd w = draw_reservoir_weights(c, rng);
        CHECK(w == Eigen::MatrixXd::Ones(3, 3));
    }

    TEST_CASE("single node scales to lambda") {
        NetworkConfig c = small_config(1, WeightPattern::Identical, 1.0, 0.1);
        c.n_inputs = 1;
        const Network net = build_network(c);
        REQUIRE(net.w_res.size() == 1);
        CHECK(net.w_res(0, 0) == doctest::Approx(0.1).epsilon(1e-15));
    }

    TEST_CASE("permutation matrix halves under lambda 0.5") {
        Eigen::MatrixXd w = mat({{0, 1}, {1, 0}});
        scale_spectral_radius(w, 0.5, 0);
        CHECK(w.isApprox(mat({{0, 0.5}, {0.5, 0}}), 1e-14));
    }

    TEST_CASE("empty reservoir is degenerate and names its seed") {
        NetworkConfig c = small_config(3, WeightPattern::Normal, 0.0);
        c.seed = 987;
        try {
            (void)build_network(c);
            FAIL("expected DegenerateReservoirError");
        } catch (const DegenerateReservoirError& e) {
            CHECK(e.seed() == 987);
            CHECK(std::string(e.what()).find("987") != std::string::npos);
        }
    }

    TEST_CASE("nilpotent realization is degenerate") {
        Eigen::MatrixXd w = mat({{0, 1, 0}, {0, 0, 1}, {0, 0, 0}});
        CHECK(spectral_radius(w).value == 0.0);
        CHECK_THROWS_AS(scale_spectral_radius(w, 0.5, 3), DegenerateReservoirError);
    }

    TEST_CASE("config invariants") {
        NetworkConfig c;
        c.spectral_radius = 1.0;
        CHECK_THROWS_AS(c.validate(), std::invalid_argument);
        c = NetworkConfig{};
        c.delta_in = 1.5;
        CHECK_THROWS_AS(c.validate(), std::invalid_argument);
        c = NetworkConfig{};
        c.n_nodes = 0;
        CHECK_THROWS_AS(c.validate(), std::invalid_argument);
        c = NetworkConfig{};
        c.n_inputs = 0;
        CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    }

    TEST_CASE("reservoir nonzero count follows delta_res") {
        for (double d : {0.1, 0.37, 1.0}) {
            NetworkConfig c = small_config(20, WeightPattern::Uniform, d);
            const Network net = build_network(c);
            CHECK((net.w_res.array() != 0.0).count() == std::llround(d * 400));
        }
    }

    TEST_CASE("input wiring counts") {
        NetworkConfig c = small_config(40, WeightPattern::Normal, 1.0);
        c.n_inputs = 5;
        c.delta_in = 0.3;
        c.input_wiring = InputWiring::PerPair;
        Network net = build_network(c);
        CHECK((net.w_in.array() != 0.0).count() == std::llround(0.3 * 5 * 40));

        c.input_wiring = InputWiring::PerNode;
        net = build_network(c);
        const auto wired = (net.w_in.array() != 0.0).rowwise().any().count();
        CHECK(wired == std::llround(0.3 * 40));
        // every wired node hears every input
        CHECK((net.w_in.array() != 0.0).count() == wired * 5);
    }

    TEST_CASE("gains are 1 unless the transfer is variable") {
        NetworkConfig c = small_config(50, WeightPattern::Normal, 1.0);
        CHECK(build_network(c).gains == Eigen::VectorXd::Ones(50));
        c.transfer = TransferKind::TanhVariable;
        const Eigen::VectorXd g = build_network(c).gains;
        CHECK(g.minCoeff() >= 0.0);
        CHECK(g.maxCoeff() <= 2.0);
        CHECK(g != Eigen::VectorXd::Ones(50));
    }

    TEST_CASE("identical config gives a bit-identical network") {
        NetworkConfig c = small_config(30, WeightPattern::Normal, 0.5);
        c.transfer = TransferKind::SatLinearVariable;
        const Network a = build_network(c);
        const Network b = build_network(c);
        CHECK(a.w_in == b.w_in);
        CHECK(a.w_res == b.w_res);
        CHECK(a.gains == b.gains);
        c.seed += 1;
        CHECK(build_network(c).w_res != a.w_res);
    }

    TEST_CASE("post-scaling radius equals lambda for every pattern") {
        for (WeightPattern p : {WeightPattern::Identical, WeightPattern::Uniform, WeightPattern::Normal})
            for (double d : {0.1, 1.0}) {
                NetworkConfig c = small_config(40, p, d, 0.3);
                c.seed = 17;
                const Network net = build_network(c);
                CHECK(std::abs(spectral_radius_dense(net.w_res) - 0.3) < 1e-6);
            }
    }

    TEST_CASE("input base signs are balanced") {
        // With a large v the sign of each weight is the Bernoulli sign.
        NetworkConfig c = small_config(100, WeightPattern::Normal, 1.0);
        c.input_coeff = 1000.0;
        c.n_inputs = 4;
        c.delta_in = 1.0;
        long positive = 0;
        long total = 0;
        for (std::uint64_t s = 0; s < 25; ++s) {
            c.seed = s;
            Rng rng(s);
            const Eigen::MatrixXd w = draw_input_weights(c, rng);
            positive += (w.array() > 0.0).count();
            total += w.size();
        }
        const double frac = static_cast<double>(positive) / static_cast<double>(total);
        const double sigma = std::sqrt(0.25 / static_cast<double>(total));
        CHECK(std::abs(frac - 0.5) < 3 * sigma);
    }
}

TEST_SUITE("dynamics") {
    TEST_CASE("saturated-linear transfer cases") {
        NetworkConfig c = small_config(3, WeightPattern::Identical, 1.0);
        Network net = build_network(c);
        Eigen::VectorXd z(3);
        z << 2.0, -0.5, -3.0;
        const Eigen::VectorXd y = transfer_apply(net, z);
        CHECK(y[0] == 1.0);
        CHECK(y[1] == -0.5);
        CHECK(y[2] == -1.0);

        net.gains.setZero();
        CHECK(transfer_apply(net, z).isZero(0.0));

        net.config.transfer = TransferKind::SatLinearVariable;
        net.gains.setConstant(2.0);
        z << 0.6, 0.2, -0.1;
        const Eigen::VectorXd v = transfer_apply(net, z);
        CHECK(v[0] == 1.0);
        CHECK(v[1] == doctest::Approx(0.4));
        CHECK(v[2] == doctest::Approx(-0.2));
    }

    TEST_CASE("tanh transfer") {
        NetworkConfig c = small_config(2, WeightPattern::Identical, 1.0);
        c.transfer = TransferKind::Tanh;
        const Network net = build_network(c);
        Eigen::VectorXd z(2);
        z << 0.3, -4.0;
        const Eigen::VectorXd y = transfer_apply(net, z);
        CHECK(y[0] == doctest::Approx(std::tanh(0.3)));
        CHECK(y[1] == doctest::Approx(std::tanh(-4.0)));
    }

    TEST_CASE("zero state and zero input stay at zero") {
        for (TransferKind k : {TransferKind::SatLinear, TransferKind::Tanh}) {
            NetworkConfig c = small_config(10, WeightPattern::Normal, 1.0);
            c.transfer = k;
            Network net = build_network(c);
            CHECK(step(net, Eigen::VectorXd::Zero(2)).isZero(0.0));
        }
    }

    TEST_CASE("hand-set single node") {
        NetworkConfig c = small_config(1, WeightPattern::Identical, 1.0, 0.1);
        c.n_inputs = 1;
        Network net = build_network(c);
        net.w_in(0, 0) = 1.0;
        Eigen::VectorXd u(1);
        u << 1.0;
        CHECK(step(net, u)[0] == 1.0); // f(0.1 * 0 + 1) = 1

        net.w_in(0, 0) = 0.5;
        net.state << 1.0;
        u << 0.0;
        CHECK(step(net, u)[0] == doctest::Approx(0.1).epsilon(1e-15));
    }

    TEST_CASE("override matrix replaces W_res for one step") {
        NetworkConfig c = small_config(1, WeightPattern::Identical, 1.0, 0.1);
        c.n_inputs = 1;
        Network net = build_network(c);
        net.state << 1.0;
        const Eigen::MatrixXd w = Eigen::MatrixXd::Constant(1, 1, 0.7);
        CHECK(step(net, Eigen::VectorXd::Zero(1), &w)[0] == doctest::Approx(0.7));
        CHECK(net.w_res(0, 0) == doctest::Approx(0.1));
        const Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(2, 2);
        CHECK_THROWS_AS(step(net, Eigen::VectorXd::Zero(1), &bad), std::invalid_argument);
    }

    TEST_CASE("run records bias-extended states after washout") {
        NetworkConfig c = small_config(8, WeightPattern::Normal, 1.0);
        Network net = build_network(c);
        const StateTrajectory z = run(net, Eigen::MatrixXd::Zero(5, 2), 0);
        CHECK(z.size() == 5);
        CHECK(z.rows.leftCols(8).isZero(0.0));
        CHECK(z.rows.col(8) == Eigen::VectorXd::Ones(5));

        Eigen::MatrixXd u = Eigen::MatrixXd::Ones(5, 2);
        const StateTrajectory last = run(net, u, 4);
        CHECK(last.size() == 1);
        CHECK(last.t0 == 4);
        CHECK(last.rows.row(0).head(8) == net.state.transpose());

        CHECK_THROWS_AS(run(net, Eigen::MatrixXd(0, 2), 0), std::invalid_argument);
        CHECK_THROWS_AS(run(net, u, 5), std::invalid_argument);
    }

    TEST_CASE("states stay bounded") {
        Rng rng(3);
        // |pre-activation| stays well below 19, where tanh rounds to 1.0 in double
        std::uniform_real_distribution<double> in(-1.0, 1.0);
        for (TransferKind k : {TransferKind::SatLinear, TransferKind::Tanh, TransferKind::TanhVariable}) {
            NetworkConfig c = small_config(30, WeightPattern::Normal, 1.0, 0.9);
            c.transfer = k;
            c.input_coeff = 2.0;
            Network net = build_network(c);
            Eigen::MatrixXd u(200, 2);
            for (Eigen::Index i = 0; i < u.size(); ++i)
                u.data()[i] = in(rng);
            const StateTrajectory tr = run(net, u, 0);
            const double peak = tr.rows.leftCols(30).cwiseAbs().maxCoeff();
            CHECK(peak <= 1.0);
            if (k != TransferKind::SatLinear)
                CHECK(peak < 1.0);
        }
    }

    TEST_CASE("echo state property at lambda 0.1") {
        NetworkConfig c = small_config(100, WeightPattern::Normal, 1.0, 0.1);
        Network a = build_network(c);
        Network b = a;
        Rng rng(8);
        std::uniform_real_distribution<double> init(-1.0, 1.0);
        for (Eigen::Index i = 0; i < 100; ++i) {
            a.state[i] = init(rng);
            b.state[i] = init(rng);
        }
        std::bernoulli_distribution bit(0.5);
        Eigen::VectorXd u(2);
        for (int t = 0; t < 30; ++t) {
            u << bit(rng), bit(rng);
            step(a, u);
            step(b, u);
        }
        CHECK((a.state - b.state).norm() < 1e-9);
    }
}
