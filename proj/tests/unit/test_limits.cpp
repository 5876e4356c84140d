#include <doctest.h>

#include <cmath>
#include <numbers>

#include "../oracle.hpp"
#include "mmv/denoisers.hpp"
#include "mmv/errors.hpp"
#include "mmv/limits.hpp"
#include "mmv/metrics.hpp"
#include "mmv/rng.hpp"

using namespace mmv;

namespace {

// Weighted support error straight from the two chi-square tails.
double mmwse_oracle(double dv, double rho, double beta, int J) {
    const double log_ratio =
        std::log(beta / (1 - beta)) + std::log((1 - rho) / rho) + 0.5 * J * std::log(1 + 1 / dv);
    const double tau = 2 * dv * (1 + dv) * log_ratio;
    if (tau <= 0) {
        return beta * (1 - rho);
    }
    const double fa = oracle::chi_square_upper(tau / dv, J);
    const double miss = 1.0 - oracle::chi_square_upper(tau / (1 + dv), J);
    return beta * (1 - rho) * fa + (1 - beta) * rho * miss;
}

// Expected squared norm of the posterior mean, integrated over g = |q|^2
// with the two scaled chi-square laws; mmse = J rho - that.
double mmse_oracle(double dv, double rho, int J) {
    auto second_moment = [&](double g) {
        const double pi =
            1.0 / (1.0 + (1 - rho) / rho * std::pow(1 + 1 / dv, 0.5 * J) * std::exp(-g / (2 * dv * (1 + dv))));
        return pi * pi * g / ((1 + dv) * (1 + dv));
    };
    // Substitute g = scale * s^2 to remove the J = 1 pole.
    auto expect = [&](double scale) {
        return oracle::integrate(
            [&](double s) { return 2 * s * oracle::chi_square_pdf(s * s, J) * second_moment(scale * s * s); }, 0.0,
            45.0, 600);
    };
    return J * rho - ((1 - rho) * expect(dv) + rho * expect(1 + dv));
}

// E|x - t| under the spike-and-slab posterior, slab integrated numerically.
double abs_loss_oracle(double pi, double mu, double sigma, double t) {
    const double slab = oracle::integrate([&](double x) { return std::abs(x - t) * oracle::gauss(x, mu, sigma * sigma); },
                                          mu - 12 * sigma, mu + 12 * sigma, 60);
    return (1 - pi) * std::abs(t) + pi * slab;
}

} // namespace

TEST_SUITE("limits") {

TEST_CASE("MMWSE worked example") {
    const auto r = mmwse({1.0, 0.1, 2, 0.2});
    const double tau = 4.0 * std::log(4.5);
    CHECK(r.p_false_alarm.value() == doctest::Approx(std::exp(-tau / 2)).epsilon(1e-13));
    CHECK(r.p_miss.value() == doctest::Approx(1 - std::exp(-tau / 4)).epsilon(1e-13));
    CHECK(r.value == doctest::Approx(0.2 * 0.9 * std::exp(-tau / 2) + 0.8 * 0.1 * (1 - std::exp(-tau / 4))));
    CHECK(std::abs(r.value - 0.07111) < 5e-6);
    CHECK(std::abs(*r.p_false_alarm - 0.04938) < 5e-6);
    CHECK(std::abs(*r.p_miss - 0.77778) < 5e-6);
    CHECK(r.method == LimitMethod::ClosedForm);
}

TEST_CASE("MMWSE closed form against chi-square quadrature, 50 cases") {
    Rng rng(18);
    int cases = 0;
    double worst = 0.0;
    while (cases < 50) {
        const double dv = std::exp(std::log(0.005) + rng.uniform() * std::log(400.0));
        const double rho = 0.02 + 0.5 * rng.uniform();
        const double beta = 0.05 + 0.9 * rng.uniform();
        const int J = 1 + static_cast<int>(rng.bits() % 8);
        const double got = mmwse({dv, rho, J, beta}).value;
        const double want = mmwse_oracle(dv, rho, beta, J);
        INFO("dv=" << dv << " rho=" << rho << " beta=" << beta << " J=" << J);
        REQUIRE(std::abs(got - want) <= 1e-8);
        worst = std::max(worst, std::abs(got - want));
        ++cases;
    }
    MESSAGE("worst MMWSE deviation " << worst);
}

TEST_CASE("chi-square oracle density integrates to one") {
    for (int J = 1; J <= 8; ++J) {
        CHECK(std::abs(oracle::chi_square_upper(0.0, J) - 1.0) <= 1e-10);
    }
}

TEST_CASE("MMWSE limits and degenerate weights") {
    CHECK(mmwse({1e-9, 0.1, 3, 0.2}).value < 1e-12);
    const auto never_penalized = mmwse({0.5, 0.1, 2, 0.0});
    CHECK(never_penalized.value == 0.0);
    CHECK(*never_penalized.p_miss == 0.0);
    // beta = 1 charges only false alarms, so nothing is declared active.
    const auto never_active = mmwse({0.5, 0.1, 2, 1.0});
    CHECK(never_active.value == 0.0);
    CHECK(*never_active.p_miss == 1.0);
    // A negative tau declares everything active.
    const auto eager = mmwse({0.5, 0.1, 1, 0.001});
    CHECK(*eager.p_false_alarm == 1.0);
    CHECK(*eager.p_miss == 0.0);
    CHECK_THROWS_AS(mmwse({1.0, 0.1, 2, std::nullopt}), ParameterError);
    CHECK_THROWS_AS(mmwse({-1.0, 0.1, 2, 0.2}), ParameterError);
}

TEST_CASE("ROC endpoints, ordering and dominance") {
    const auto grid = default_roc_grid(0.2, 3, 200);
    REQUIRE(grid.size() == 200);
    CHECK(grid.front() == 0.0);
    const auto curve = roc_curve(0.2, 3, grid);
    CHECK(curve.front().fpr == 1.0);
    CHECK(curve.front().tpr == 1.0);
    CHECK(curve.back().fpr < 1e-9);
    CHECK(curve.back().tpr < 1e-9);
    for (std::size_t i = 1; i < curve.size(); ++i) {
        REQUIRE(curve[i].fpr <= curve[i - 1].fpr);
        REQUIRE(curve[i].tpr <= curve[i - 1].tpr);
        REQUIRE(curve[i].tpr >= curve[i].fpr);
    }
    const double a1 = roc_area(roc_curve(0.2, 1, default_roc_grid(0.2, 1)));
    const double a3 = roc_area(roc_curve(0.2, 3, default_roc_grid(0.2, 3)));
    const double a5 = roc_area(roc_curve(0.2, 5, default_roc_grid(0.2, 5)));
    CHECK(a1 > 0.5);
    CHECK(a5 > a3);
    CHECK(a3 > a1);
    CHECK(a5 < 1.0);

    const std::vector<double> unsorted{1.0, 0.5};
    CHECK_THROWS_AS(roc_curve(0.2, 1, unsorted), ParameterError);
}

TEST_CASE("ROC points agree with the chi-square oracle") {
    const std::vector<double> t{0.3, 1.0, 2.5};
    const auto curve = roc_curve(0.4, 2, t);
    for (std::size_t i = 0; i < t.size(); ++i) {
        CHECK(std::abs(curve[i].fpr - oracle::chi_square_upper(t[i] / 0.4, 2)) < 1e-10);
        CHECK(std::abs(curve[i].tpr - oracle::chi_square_upper(t[i] / 1.4, 2)) < 1e-10);
    }
}

TEST_CASE("MMAE for a Gaussian prior") {
    for (double dv : {0.05, 0.5, 3.0}) {
        const double want = std::sqrt(2 / std::numbers::pi) * std::sqrt(dv / (1 + dv));
        CHECK(mmae_quadrature({dv, 1.0, 1, std::nullopt}).value == doctest::Approx(want).epsilon(1e-8));
        const auto mc = mmae({dv, 1.0, 2, std::nullopt}, 20000, 3);
        CHECK(mc.value == doctest::Approx(want).epsilon(1e-12));
    }
    CHECK(mmae_quadrature({1e-10, 0.1, 1, std::nullopt}).value < 1e-5);
}

TEST_CASE("MMAE quadrature against a direct double integral") {
    for (double dv : {0.02, 0.25, 1.5}) {
        for (double rho : {0.05, 0.1, 0.4}) {
            const double sd0 = std::sqrt(dv);
            const double sd1 = std::sqrt(1 + dv);
            const double shrink = 1 / (1 + dv);
            const double sigma = std::sqrt(dv * shrink);
            auto integrand = [&](double q) {
                const double dens = (1 - rho) * oracle::gauss(q, 0, dv) + rho * oracle::gauss(q, 0, 1 + dv);
                const double pi = bg_active_probability(dv, q * q, rho, Eigen::Index{1});
                const double mu = q * shrink;
                return dens * abs_loss_oracle(pi, mu, sigma, mae_median(pi, mu, sigma));
            };
            const double L = 14 * std::max(sd0, sd1);
            const double want = oracle::integrate(integrand, -L, L, 800);
            const double got = mmae_quadrature({dv, rho, 1, std::nullopt}).value;
            INFO("dv=" << dv << " rho=" << rho);
            CHECK(got == doctest::Approx(want).epsilon(1e-6));
        }
    }
}

TEST_CASE("MMAE Monte Carlo agrees with quadrature") {
    const LimitQuery q{0.25, 0.1, 1, std::nullopt};
    const auto mc = mmae(q, 1000000, 12);
    const auto quad = mmae_quadrature(q);
    CHECK(mc.method == LimitMethod::MonteCarlo);
    CHECK(mc.n_samples == 1000000);
    CHECK(std::abs(mc.value - quad.value) <= 3 * mc.std_error);
    CHECK_THROWS_AS(mmae(q, 99, 1), ParameterError);
    CHECK_THROWS_AS(mmae_quadrature({0.25, 0.1, 2, std::nullopt}), ParameterError);
}

TEST_CASE("mmse_of_delta against the radial oracle") {
    for (int J : {1, 2, 3, 5}) {
        for (double dv : {1e-3, 0.02, 0.3, 2.0, 50.0}) {
            for (double rho : {0.05, 0.1, 0.5}) {
                const double got = mmse_of_delta(dv, rho, J);
                const double want = mmse_oracle(dv, rho, J);
                INFO("J=" << J << " dv=" << dv << " rho=" << rho);
                CHECK(got == doctest::Approx(want).epsilon(1e-8));
            }
        }
    }
}

TEST_CASE("mmse_of_delta limits, monotonicity and bound") {
    CHECK(std::abs(mmse_of_delta(1e6, 0.1, 1) - 0.1) < 1e-3);
    CHECK(mmse_of_delta(1e-9, 0.1, 2) < 1e-8);
    for (int J : {1, 3}) {
        double prev = 0.0;
        for (int i = 0; i <= 60; ++i) {
            const double dv = std::pow(10.0, -6.0 + 0.2 * i);
            const double m = mmse_of_delta(dv, 0.1, J);
            REQUIRE(m > prev);
            REQUIRE(m < J * 0.1);
            prev = m;
        }
    }
}

TEST_CASE("mmse_of_delta matches Monte Carlo of the denoiser") {
    for (int J : {1, 3}) {
        const double dv = 0.15;
        const double rho = 0.1;
        Rng rng(50 + J);
        const int S = 1000000;
        double sum = 0.0;
        double sum_sq = 0.0;
        Eigen::RowVectorXd x(J), q(J);
        for (int s = 0; s < S; ++s) {
            const bool active = rng.uniform() < rho;
            for (int j = 0; j < J; ++j) {
                x[j] = active ? rng.normal() : 0.0;
                q[j] = x[j] + std::sqrt(dv) * rng.normal();
            }
            const double err = (bg_denoise(dv, q, rho).mean - x).squaredNorm();
            sum += err;
            sum_sq += err * err;
        }
        const double mean = sum / S;
        const double se = std::sqrt((sum_sq / S - mean * mean) / (S - 1));
        CHECK(std::abs(mean - mmse_of_delta(dv, rho, J)) <= 3 * se);
    }
}

TEST_CASE("invert_mmse round trip and monotonicity") {
    for (int J : {1, 2, 4}) {
        const double rho = 0.1;
        for (double frac : {0.1, 0.5, 0.9}) {
            const double target = frac * J * rho;
            const auto inv = invert_mmse(target, rho, J);
            CHECK_FALSE(inv.saturated);
            CHECK(std::abs(mmse_of_delta(inv.delta_v, rho, J) - target) <= 1e-9);
        }
        double prev = 0.0;
        for (int i = 1; i <= 20; ++i) {
            const double dv = invert_mmse(J * rho * i / 21.0, rho, J).delta_v;
            REQUIRE(dv > prev);
            prev = dv;
        }
    }
    // A target a hair below J rho is reached only at a huge delta_v.
    const double near_ceiling = 0.1 * (1 - 1e-15);
    const auto far = invert_mmse(near_ceiling, 0.1, 1);
    CHECK(far.delta_v > 1e6);
    CHECK(far.delta_v <= kMaxDeltaV);
    CHECK(std::abs(mmse_of_delta(far.delta_v, 0.1, 1) - near_ceiling) <= 1e-9);
    CHECK_THROWS_AS(invert_mmse(0.0, 0.1, 1), ParameterError);
    CHECK_THROWS_AS(invert_mmse(0.1, 0.1, 1), ParameterError);
}

TEST_CASE("state evolution with a Gaussian prior solves the quadratic") {
    const double R = 0.5;
    const double dz = 0.01;
    // R d^2 + (R - dz - 1) d - dz = 0
    const double b = R - dz - 1.0;
    const double want = (-b + std::sqrt(b * b + 4 * R * dz)) / (2 * R);
    CHECK(state_evolution_delta(R, 1.0, 1, dz) == doctest::Approx(want).epsilon(1e-8));
    CHECK(state_evolution_delta(R, 1.0, 3, dz) == doctest::Approx(want).epsilon(1e-8));
}

TEST_CASE("state evolution in the noiseless recovery regime") {
    CHECK(state_evolution_delta(0.5, 0.1, 1, 1e-12) < 1e-9);
    CHECK(state_evolution_delta(0.5, 0.1, 1, 0.01) > state_evolution_delta(0.5, 0.1, 3, 0.01));
}

}
