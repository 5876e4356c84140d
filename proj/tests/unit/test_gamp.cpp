#include <doctest.h>

#include <cmath>

#include "mmv/errors.hpp"
#include "mmv/gamp.hpp"
#include "mmv/limits.hpp"
#include "mmv/model.hpp"

using namespace mmv;

namespace {

ProblemInstance awgn_instance(Eigen::Index N, double R, Eigen::Index J, double rho, double dz, std::uint64_t seed) {
    InstanceParams p;
    p.N = N;
    p.M = static_cast<Eigen::Index>(std::llround(R * static_cast<double>(N)));
    p.J = J;
    p.rho = rho;
    p.channel = AwgnChannel{dz};
    return make_instance(p, seed);
}

} // namespace

TEST_SUITE("gamp") {

TEST_CASE("dense signal, nearly noiseless") {
    const auto inst = awgn_instance(1000, 0.8, 1, 0.5, 1e-6, 4);
    const auto out = run_gamp(inst.measurements, {PriorKind::BernoulliGaussian, 0.5}, {});
    const double mse = (out.x_hat - inst.signal.entries).squaredNorm() / 1000.0;
    CHECK(mse < 1e-3);
    CHECK(out.converged);
    CHECK(out.iterations <= 200);
    CHECK(out.iterations == static_cast<int>(out.trace.size()));
}

TEST_CASE("zero signal is found as zero") {
    auto inst = awgn_instance(800, 0.5, 2, 0.1, 0.01, 5);
    // Replace the observations with pure noise.
    for (std::size_t j = 0; j < 2; ++j) {
        inst.measurements.observations[j] =
            measure(inst.measurements.matrices[j], Eigen::VectorXd::Zero(800), AwgnChannel{0.01}, 90 + j);
    }
    const auto out = run_gamp(inst.measurements, {PriorKind::BernoulliGaussian, 0.1}, {});
    CHECK(out.x_hat.squaredNorm() / 800.0 < out.delta_v);
}

TEST_CASE("variances stay nonnegative and the scalar variance positive") {
    const auto inst = awgn_instance(600, 0.4, 3, 0.1, 0.01, 6);
    GampConfig cfg;
    for (int t_max : {2, 5, 30}) {
        cfg.t_max = t_max;
        const auto out = run_gamp(inst.measurements, {PriorKind::BernoulliGaussian, 0.1}, cfg);
        CHECK(out.s.minCoeff() >= 0.0);
        CHECK(out.delta_v > 0.0);
        CHECK(out.iterations <= t_max);
        CHECK(out.pi.minCoeff() >= 0.0);
        CHECK(out.pi.maxCoeff() <= 1.0);
    }
}

TEST_CASE("identical channels give identical scalar variances") {
    auto inst = awgn_instance(500, 0.5, 3, 0.1, 0.01, 7);
    for (std::size_t j = 1; j < 3; ++j) {
        inst.measurements.matrices[j] = inst.measurements.matrices[0];
        inst.measurements.observations[j] = inst.measurements.observations[0];
    }
    const auto out = run_gamp(inst.measurements, {PriorKind::BernoulliGaussian, 0.1}, {});
    const auto& d = out.delta_v_per_channel;
    CHECK(std::abs(d[1] - d[0]) <= 1e-10 * d[0]);
    CHECK(std::abs(d[2] - d[0]) <= 1e-10 * d[0]);
}

TEST_CASE("output is bit-identical across runs and worker counts") {
    const auto inst = awgn_instance(700, 0.5, 4, 0.1, 0.01, 8);
    GampConfig one;
    GampConfig many;
    many.workers = 3;
    const auto a = run_gamp(inst.measurements, {PriorKind::BernoulliGaussian, 0.1}, one);
    const auto b = run_gamp(inst.measurements, {PriorKind::BernoulliGaussian, 0.1}, one);
    const auto c = run_gamp(inst.measurements, {PriorKind::BernoulliGaussian, 0.1}, many);
    CHECK(a.x_hat == b.x_hat);
    CHECK(a.x_hat == c.x_hat);
    CHECK(a.q == c.q);
    CHECK(a.delta_v == c.delta_v);
    CHECK(a.iterations == c.iterations);
}

TEST_CASE("sum aggregation scales the scalar variance by J") {
    const auto inst = awgn_instance(500, 0.5, 3, 0.1, 0.01, 9);
    GampConfig cfg;
    cfg.t_max = 2;
    const auto mean = run_gamp(inst.measurements, {PriorKind::BernoulliGaussian, 0.1}, cfg);
    cfg.delta_aggregation = DeltaAggregation::Sum;
    const auto sum = run_gamp(inst.measurements, {PriorKind::BernoulliGaussian, 0.1}, cfg);
    CHECK(sum.trace.front().delta_v == doctest::Approx(3.0 * mean.trace.front().delta_v).epsilon(1e-12));
}

TEST_CASE("the noise-scaled start reaches the same fixed point on a benign instance") {
    const auto inst = awgn_instance(1000, 0.5, 1, 0.1, 0.01, 10);
    GampConfig cfg;
    const auto prior = run_gamp(inst.measurements, {PriorKind::BernoulliGaussian, 0.1}, cfg);
    cfg.init_variance = InitVariance::NoiseScaled;
    const auto scaled = run_gamp(inst.measurements, {PriorKind::BernoulliGaussian, 0.1}, cfg);
    CHECK(scaled.delta_v == doctest::Approx(prior.delta_v).epsilon(1e-4));
    CHECK((scaled.x_hat - prior.x_hat).norm() < 1e-3 * prior.x_hat.norm());
}

TEST_CASE("binary prior on a signed Bernoulli matrix") {
    InstanceParams p;
    p.N = 1000;
    p.M = 500;
    p.rho = 0.1;
    p.prior_kind = PriorKind::BernoulliBinary;
    p.matrix_kind = MatrixKind::SignedBernoulli;
    p.channel = AwgnChannel{0.01};
    const auto inst = make_instance(p, 11);
    const auto out = run_gamp(inst.measurements, {PriorKind::BernoulliBinary, 0.1}, {});
    const Eigen::ArrayXd decided = (out.x_hat.col(0).array() > 0.5).cast<double>();
    const double errors = (decided - inst.signal.entries.col(0).array()).abs().sum();
    CHECK(errors <= 5.0);
}

TEST_CASE("logistic channel runs and tracks the signal") {
    InstanceParams p;
    p.N = 1000;
    p.M = 600;
    p.J = 2;
    p.rho = 0.1;
    p.channel = LogisticChannel{30.0, nullptr};
    const auto inst = make_instance(p, 12);
    const auto out = run_gamp(inst.measurements, {PriorKind::BernoulliGaussian, 0.1}, {});
    const double mse = (out.x_hat - inst.signal.entries).squaredNorm() / (1000.0 * 2);
    CHECK(out.delta_v > 0.0);
    CHECK(mse < 0.1 * 0.5);
}

TEST_CASE("state evolution predicts the converged scalar variance") {
    double total = 0.0;
    const int runs = 20;
    for (int s = 0; s < runs; ++s) {
        const auto inst = awgn_instance(5000, 0.5, 1, 0.1, 0.01, 300 + static_cast<std::uint64_t>(s));
        total += run_gamp(inst.measurements, {PriorKind::BernoulliGaussian, 0.1}, {}).delta_v;
    }
    const double predicted = state_evolution_delta(0.5, 0.1, 1, 0.01);
    CHECK(std::abs(predicted / (total / runs) - 1.0) < 0.10);
}

TEST_CASE("invalid inputs") {
    auto inst = awgn_instance(50, 0.5, 2, 0.1, 0.01, 13);
    GampConfig bad;
    bad.t_max = 0;
    CHECK_THROWS_AS(run_gamp(inst.measurements, {PriorKind::BernoulliGaussian, 0.1}, bad), ParameterError);
    bad = {};
    bad.damping = 1.0;
    CHECK_THROWS_AS(run_gamp(inst.measurements, {PriorKind::BernoulliGaussian, 0.1}, bad), ParameterError);
    CHECK_THROWS_AS(run_gamp(inst.measurements, {PriorKind::BernoulliGaussian, 1.0}, {}), ParameterError);
    inst.measurements.observations[1].resize(3);
    CHECK_THROWS_AS(run_gamp(inst.measurements, {PriorKind::BernoulliGaussian, 0.1}, {}), ParameterError);
}

TEST_CASE("a hostile instance diverges with its trace attached") {
    // Observations far outside anything the model can explain.
    auto inst = awgn_instance(200, 0.5, 1, 0.1, 1e-8, 14);
    inst.measurements.observations[0].setConstant(1e200);
    try {
        run_gamp(inst.measurements, {PriorKind::BernoulliGaussian, 0.1}, {});
        FAIL("expected divergence");
    } catch (const DivergenceError& e) {
        CHECK(std::string(e.what()).find("GAMP") != std::string::npos);
        CHECK(e.trace().size() < 200);
    }
}

}
