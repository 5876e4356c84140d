#pragma once

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/erf.hpp>

namespace mmv {

template <typename T>
T normal_pdf(T x) {
    return std::exp(T(-0.5) * x * x) / std::sqrt(T(2) * std::numbers::pi_v<T>);
}

template <typename T>
T log_normal_pdf(T x) {
    return T(-0.5) * x * x - T(0.5) * std::log(T(2) * std::numbers::pi_v<T>);
}

template <typename T>
T normal_cdf(T x) {
    return T(0.5) * std::erfc(-x / std::numbers::sqrt2_v<T>);
}

/// Mills ratio Phi(-x)/phi(x) for x >= 5 via its Laplace continued fraction.
template <typename T>
T mills_ratio_tail(T x) {
    T acc = x;
    for (int n = 60; n >= 1; --n) {
        acc = x + T(n) / acc;
    }
    return T(1) / acc;
}

/// Threshold below which Phi is evaluated through the tail expansion.
inline constexpr double kNormalTailCut = -30.0;

template <typename T>
T log_normal_cdf(T x) {
    if (x >= T(0)) {
        return std::log1p(T(-0.5) * std::erfc(x / std::numbers::sqrt2_v<T>));
    }
    if (x > T(kNormalTailCut)) {
        return std::log(normal_cdf(x));
    }
    return log_normal_pdf(x) + std::log(mills_ratio_tail(-x));
}

/// phi(x)/Phi(x), finite for every real x.
template <typename T>
T inverse_mills(T x) {
    if (x > T(kNormalTailCut)) {
        return normal_pdf(x) / normal_cdf(x);
    }
    return T(1) / mills_ratio_tail(-x);
}

/// Standard normal quantile, p in (0, 1).
template <typename T>
T normal_quantile(T p) {
    return -std::numbers::sqrt2_v<T> * boost::math::erfc_inv(T(2) * p);
}

} // namespace mmv
