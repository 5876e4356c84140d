#include <doctest.h>

#include <cmath>
#include <set>

#include "mmv/rng.hpp"

using namespace mmv;

TEST_SUITE("rng") {

TEST_CASE("same seed, same stream") {
    Rng a(17);
    Rng b(17);
    for (int i = 0; i < 1000; ++i) {
        REQUIRE(a.bits() == b.bits());
    }
    Rng c(17);
    Rng d(17);
    for (int i = 0; i < 1000; ++i) {
        REQUIRE(c.normal() == d.normal());
    }
}

TEST_CASE("derived seeds depend on every path element and its order") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 20; ++i) {
        for (std::uint64_t j = 0; j < 20; ++j) {
            seen.insert(derive_seed(42, {i, j}));
        }
    }
    CHECK(seen.size() == 400);
    CHECK(derive_seed(42, {1, 2}) != derive_seed(42, {2, 1}));
    CHECK(derive_seed(42, {1}) != derive_seed(43, {1}));
    CHECK(derive_seed(42, {1, 2}) == derive_seed(42, {1, 2}));
}

TEST_CASE("uniform stays in the open unit interval") {
    Rng r(3);
    double lo = 1.0;
    double hi = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double u = r.uniform();
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    CHECK(lo > 0.0);
    CHECK(hi < 1.0);
}

TEST_CASE("normal moments") {
    Rng r(5);
    const int n = 400000;
    double s1 = 0.0;
    double s2 = 0.0;
    double s4 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = r.normal();
        s1 += z;
        s2 += z * z;
        s4 += z * z * z * z;
    }
    CHECK(std::abs(s1 / n) < 5.0 / std::sqrt(n));
    CHECK(std::abs(s2 / n - 1.0) < 5.0 * std::sqrt(2.0 / n));
    CHECK(std::abs(s4 / n - 3.0) < 5.0 * std::sqrt(96.0 / n));
}

TEST_CASE("bernoulli and sign frequencies") {
    Rng r(11);
    const int n = 200000;
    int hits = 0;
    int plus = 0;
    for (int i = 0; i < n; ++i) {
        hits += r.bernoulli(0.1) ? 1 : 0;
        plus += r.sign() > 0 ? 1 : 0;
    }
    CHECK(std::abs(hits / double(n) - 0.1) < 5.0 * std::sqrt(0.09 / n));
    CHECK(std::abs(plus / double(n) - 0.5) < 5.0 * std::sqrt(0.25 / n));
}

}
