#pragma once

#include <cmath>

#include <Eigen/Dense>

#include "mmv/errors.hpp"

namespace mmv {

template <typename Scalar>
using SuperSymbol = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

/// Posterior of one super-symbol given its pseudo data: elementwise mean and
/// variance, and the probability that the super-symbol is active.
template <typename Scalar>
struct Posterior {
    SuperSymbol<Scalar> mean;
    SuperSymbol<Scalar> var;
    Scalar pi;
};

namespace detail {

template <typename Scalar>
Scalar logistic_of_neg(Scalar log_odds_against) {
    // 1 / (1 + exp(t)); saturates cleanly to 0 or 1.
    return Scalar(1) / (Scalar(1) + std::exp(log_odds_against));
}

template <typename Scalar>
void check_denoiser_args(Scalar delta_v, Scalar rho) {
    if (!(delta_v > Scalar(0)) || !std::isfinite(delta_v)) {
        throw ParameterError("scalar-channel variance must be positive and finite");
    }
    if (!(rho > Scalar(0) && rho <= Scalar(1))) {
        throw ParameterError("sparsity rate must lie in (0, 1]");
    }
}

} // namespace detail

/// P(active | q) for the Bernoulli-Gaussian prior with phi = N(0, I), as a
/// function of the squared norm of q only. Log-domain, total on its domain.
template <typename Scalar>
Scalar bg_active_probability(Scalar delta_v, Scalar sq_norm, Scalar rho, Eigen::Index J) {
    if (rho >= Scalar(1)) {
        return Scalar(1);
    }
    const Scalar log_against = std::log((Scalar(1) - rho) / rho) +
                               Scalar(0.5) * Scalar(J) * std::log1p(Scalar(1) / delta_v) -
                               sq_norm / (Scalar(2) * delta_v * (delta_v + Scalar(1)));
    return detail::logistic_of_neg(log_against);
}

/// Bernoulli-Gaussian MMSE denoiser writing into caller-provided rows.
/// Returns the active probability rho / C.
template <typename Q, typename MeanOut, typename VarOut>
typename Q::Scalar bg_denoise_into(const Eigen::MatrixBase<Q>& q, typename Q::Scalar delta_v,
                                   typename Q::Scalar rho, const Eigen::MatrixBase<MeanOut>& mean_out,
                                   const Eigen::MatrixBase<VarOut>& var_out) {
    using Scalar = typename Q::Scalar;
    detail::check_denoiser_args(delta_v, rho);
    const Scalar pi = bg_active_probability(delta_v, q.squaredNorm(), rho, q.size());
    const Scalar shrink = Scalar(1) / (delta_v + Scalar(1));
    auto& mean = const_cast<Eigen::MatrixBase<MeanOut>&>(mean_out);
    auto& var = const_cast<Eigen::MatrixBase<VarOut>&>(var_out);
    // var = pi * (Delta/(1+Delta) + mu^2) - (pi mu)^2, regrouped to stay >= 0.
    const auto active_mean = (q.derived().array() * shrink).eval();
    mean = (pi * active_mean).matrix();
    var = (pi * delta_v * shrink + pi * (Scalar(1) - pi) * active_mean.square()).matrix();
    return pi;
}

template <typename Q>
Posterior<typename Q::Scalar> bg_denoise(typename Q::Scalar delta_v, const Eigen::MatrixBase<Q>& q,
                                         typename Q::Scalar rho) {
    Posterior<typename Q::Scalar> out;
    out.mean.resize(q.size());
    out.var.resize(q.size());
    out.pi = bg_denoise_into(q, delta_v, rho, out.mean, out.var);
    return out;
}

/// P(x = 1 | q) for the all-ones / all-zeros prior observed through N(0, delta_v).
template <typename Scalar>
Scalar bernoulli_active_probability(Scalar delta_v, Scalar sum_q, Scalar rho, Eigen::Index J) {
    if (rho >= Scalar(1)) {
        return Scalar(1);
    }
    const Scalar log_against = std::log((Scalar(1) - rho) / rho) - (sum_q - Scalar(0.5) * Scalar(J)) / delta_v;
    return detail::logistic_of_neg(log_against);
}

template <typename Q, typename MeanOut, typename VarOut>
typename Q::Scalar bernoulli_denoise_into(const Eigen::MatrixBase<Q>& q, typename Q::Scalar delta_v,
                                          typename Q::Scalar rho, const Eigen::MatrixBase<MeanOut>& mean_out,
                                          const Eigen::MatrixBase<VarOut>& var_out) {
    using Scalar = typename Q::Scalar;
    detail::check_denoiser_args(delta_v, rho);
    const Scalar pi = bernoulli_active_probability(delta_v, q.sum(), rho, q.size());
    const_cast<Eigen::MatrixBase<MeanOut>&>(mean_out).setConstant(pi);
    const_cast<Eigen::MatrixBase<VarOut>&>(var_out).setConstant(pi - pi * pi);
    return pi;
}

template <typename Q>
Posterior<typename Q::Scalar> bernoulli_denoise(typename Q::Scalar delta_v, const Eigen::MatrixBase<Q>& q,
                                                typename Q::Scalar rho) {
    Posterior<typename Q::Scalar> out;
    out.mean.resize(q.size());
    out.var.resize(q.size());
    out.pi = bernoulli_denoise_into(q, delta_v, rho, out.mean, out.var);
    return out;
}

} // namespace mmv
