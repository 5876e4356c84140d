#include <doctest.h>

#include <cmath>
#include <set>

#include "mmv/errors.hpp"
#include "mmv/model.hpp"
#include "mmv/omp.hpp"
#include "mmv/rng.hpp"

using namespace mmv;

TEST_SUITE("omp") {

TEST_CASE("one-sparse exact recovery") {
    const auto A = generate_matrix(40, 100, MatrixKind::GaussianUnitRow, 1);
    const Eigen::VectorXd y = 3.0 * A.col(17);
    OmpConfig cfg;
    cfg.max_atoms = 10;
    cfg.residual_tol = 1e-9;
    const auto r = omp(A, y, cfg);
    REQUIRE(r.support.size() == 1);
    CHECK(r.support[0] == 17);
    CHECK(std::abs(r.x_hat[17] - 3.0) <= 1e-10);
    CHECK(r.x_hat.cwiseAbs().sum() - std::abs(r.x_hat[17]) == 0.0);
}

TEST_CASE("zero observation selects nothing") {
    const auto A = generate_matrix(20, 50, MatrixKind::GaussianUnitRow, 2);
    OmpConfig cfg;
    cfg.max_atoms = 5;
    const auto r = omp(A, Eigen::VectorXd::Zero(20), cfg);
    CHECK(r.support.empty());
    CHECK(r.x_hat.isZero(0.0));
}

TEST_CASE("residuals shrink and atoms never repeat") {
    const auto A = generate_matrix(60, 200, MatrixKind::GaussianUnitRow, 3);
    Rng rng(4);
    Eigen::VectorXd y(60);
    for (auto& v : y) {
        v = rng.normal();
    }
    OmpConfig cfg;
    cfg.max_atoms = 40;
    const auto r = omp(A, y, cfg);
    CHECK(r.support.size() == 40);
    CHECK(r.residual_norms.size() == r.support.size());
    CHECK(std::set<Eigen::Index>(r.support.begin(), r.support.end()).size() == r.support.size());
    for (std::size_t i = 1; i < r.residual_norms.size(); ++i) {
        REQUIRE(r.residual_norms[i] <= r.residual_norms[i - 1] + 1e-12);
    }
    // The final estimate is the least-squares fit on its support.
    Eigen::MatrixXd S(60, 40);
    for (std::size_t i = 0; i < 40; ++i) {
        S.col(static_cast<Eigen::Index>(i)) = A.col(r.support[i]);
    }
    const Eigen::VectorXd ls = S.colPivHouseholderQr().solve(y);
    for (std::size_t i = 0; i < 40; ++i) {
        REQUIRE(std::abs(r.x_hat[r.support[i]] - ls[static_cast<Eigen::Index>(i)]) < 1e-9);
    }
}

TEST_CASE("atom budget cannot exceed the number of rows") {
    const auto A = generate_matrix(10, 30, MatrixKind::GaussianUnitRow, 5);
    OmpConfig cfg;
    cfg.max_atoms = 11;
    CHECK_THROWS_AS(omp(A, Eigen::VectorXd::Ones(10), cfg), ParameterError);
}

TEST_CASE("a repeated column is flagged rather than fatal") {
    Eigen::MatrixXd A = generate_matrix(8, 6, MatrixKind::GaussianUnitRow, 6);
    A.col(3) = A.col(1);
    OmpConfig cfg;
    cfg.max_atoms = 8;
    Rng rng(7);
    Eigen::VectorXd y(8);
    for (auto& v : y) {
        v = rng.normal();
    }
    const auto r = omp(A, y, cfg);
    CHECK(r.x_hat.allFinite());
    CHECK(r.rank_deficient);
}

TEST_CASE("noiseless sparse recovery on small instances") {
    int exact = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
        const Eigen::Index N = 256;
        const Eigen::Index k = 8;
        const auto M = static_cast<Eigen::Index>(std::ceil(4.0 * k * std::log(static_cast<double>(N))));
        const auto A = generate_matrix(M, N, MatrixKind::GaussianUnitRow, 1000 + s);
        Rng rng(2000 + s);
        Eigen::VectorXd x = Eigen::VectorXd::Zero(N);
        std::set<Eigen::Index> support;
        while (static_cast<Eigen::Index>(support.size()) < k) {
            support.insert(static_cast<Eigen::Index>(rng.bits() % N));
        }
        for (auto n : support) {
            x[n] = rng.normal();
        }
        OmpConfig cfg;
        cfg.max_atoms = k;
        const auto r = omp(A, A * x, cfg);
        exact += std::set<Eigen::Index>(r.support.begin(), r.support.end()) == support ? 1 : 0;
    }
    CHECK(exact >= 95);
}

TEST_CASE("binarize uses a strict cut") {
    Eigen::VectorXd x(2);
    x << 0.9, 0.1;
    CHECK(binarize(x, 0.5) == Eigen::Vector2d(1.0, 0.0));
    CHECK(binarize(Eigen::VectorXd::Constant(4, 0.5), 0.5).isZero(0.0));
}

TEST_CASE("threshold one half is Hamming-best on a symmetric-noise output") {
    Rng rng(8);
    const Eigen::Index n = 20000;
    Eigen::VectorXd truth(n), est(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        truth[i] = rng.uniform() < 0.5 ? 1.0 : 0.0;
        est[i] = truth[i] + 0.3 * rng.normal();
    }
    auto errors = [&](double t) { return (binarize(est, t) - truth).cwiseAbs().sum(); };
    const double at_half = errors(0.5);
    for (double t = 0.1; t <= 0.9 + 1e-12; t += 0.05) {
        if (std::abs(t - 0.5) > 0.07) {
            REQUIRE(at_half <= errors(t));
        }
    }
}

}
