#pragma once

#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "mmv/denoisers.hpp"
#include "mmv/gamp.hpp"

namespace mmv {

enum class MetricKind { MSE, MWSE, Hamming, MAE };

/// Additive error metric selected by string: "mse", "mwse:beta=0.2",
/// "hamming" or "mae".
struct MetricSpec {
    MetricKind kind = MetricKind::MSE;
    double beta = 0.5;  // MWSE false-alarm weight; misses weigh 1 - beta

    static MetricSpec parse(std::string_view text);
    std::string to_string() const;
};

/// Squared-norm threshold of the weighted support decision.
double mwse_threshold(double delta_v, double rho, double beta, Eigen::Index J);

/// Weighted support decision for the Bernoulli-Gaussian prior: true iff
/// |q|^2 > threshold (equality reports inactive). beta must lie in (0, 1).
template <typename Q>
bool mwse_estimate(const Eigen::MatrixBase<Q>& q, double delta_v, double rho, double beta) {
    return q.squaredNorm() > mwse_threshold(delta_v, rho, beta, q.size());
}

/// Threshold on sum_j q_j above which the all-ones super-symbol is chosen.
double hamming_threshold(double delta_v, double rho, Eigen::Index J);

/// Hamming-optimal all-ones/all-zeros decision (ties go to all-ones).
template <typename Q>
SuperSymbol<double> hamming_estimate(const Eigen::MatrixBase<Q>& q, double delta_v, double rho) {
    const bool active = q.sum() >= hamming_threshold(delta_v, rho, q.size());
    return SuperSymbol<double>::Constant(q.size(), active ? 1.0 : 0.0);
}

/// Median of (1 - pi) delta_0 + pi N(mu, sigma^2).
double mae_median(double pi, double mu, double sigma);

/// Componentwise posterior median under the Bernoulli-Gaussian prior; the
/// activity probability is shared across components.
template <typename Q>
SuperSymbol<double> mae_estimate(const Eigen::MatrixBase<Q>& q, double delta_v, double rho) {
    detail::check_denoiser_args(delta_v, rho);
    const double pi = bg_active_probability(delta_v, q.squaredNorm(), rho, q.size());
    const double shrink = 1.0 / (1.0 + delta_v);
    const double sigma = std::sqrt(delta_v * shrink);
    SuperSymbol<double> out(q.size());
    for (Eigen::Index j = 0; j < q.size(); ++j) {
        out[j] = mae_median(pi, q(j) * shrink, sigma);
    }
    return out;
}

template <typename Q>
SuperSymbol<double> mmse_estimate(const Eigen::MatrixBase<Q>& q, double delta_v, double rho) {
    return bg_denoise(delta_v, q, rho).mean;
}

/// Part 2 of the pipeline: maps every super-symbol of the GAMP pseudo data
/// through the metric's estimator. MWSE returns an N x 1 support vector;
/// the other metrics return N x J estimates.
Eigen::MatrixXd apply_metric(const GampOutput& output, const MetricSpec& metric, const SignalPrior& prior);

/// (1/N) sum_n d(x_n, x_est_n). For MWSE `x_est` may be N x 1 (support) or
/// N x J; a row counts as active when any entry is nonzero.
double compute_empirical_error(const Eigen::MatrixXd& x_true, const Eigen::MatrixXd& x_est, const MetricSpec& metric);

} // namespace mmv
