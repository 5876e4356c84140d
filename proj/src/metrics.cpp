#include "mmv/metrics.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <string>

#include "mmv/csv.hpp"
#include "mmv/normal.hpp"

namespace mmv {

MetricSpec MetricSpec::parse(std::string_view text) {
    MetricSpec spec;
    if (text == "mse") {
        spec.kind = MetricKind::MSE;
    } else if (text == "hamming") {
        spec.kind = MetricKind::Hamming;
    } else if (text == "mae") {
        spec.kind = MetricKind::MAE;
    } else if (text.starts_with("mwse:beta=")) {
        spec.kind = MetricKind::MWSE;
        const std::string value(text.substr(10));
        std::size_t used = 0;
        try {
            spec.beta = std::stod(value, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != value.size() || value.empty()) {
            throw SpecError("metric '" + std::string(text) + "': beta is not a number");
        }
        if (!(spec.beta >= 0.0 && spec.beta <= 1.0)) {
            throw SpecError("metric '" + std::string(text) + "': beta must lie in [0, 1]");
        }
    } else {
        throw SpecError("unknown metric '" + std::string(text) + "' (expected mse, mwse:beta=<b>, hamming or mae)");
    }
    return spec;
}

std::string MetricSpec::to_string() const {
    switch (kind) {
    case MetricKind::MSE:
        return "mse";
    case MetricKind::Hamming:
        return "hamming";
    case MetricKind::MAE:
        return "mae";
    case MetricKind::MWSE:
        break;
    }
    return "mwse:beta=" + csv::num(beta);
}

double mwse_threshold(double delta_v, double rho, double beta, Eigen::Index J) {
    if (!(beta > 0.0 && beta < 1.0)) {
        throw SpecError("MWSE with beta in {0, 1} is degenerate; use the constant estimator");
    }
    detail::check_denoiser_args(delta_v, rho);
    const double log_ratio = std::log(beta / (1.0 - beta)) + std::log((1.0 - rho) / rho) +
                             0.5 * static_cast<double>(J) * std::log1p(1.0 / delta_v);
    return 2.0 * delta_v * (1.0 + delta_v) * log_ratio;
}

double hamming_threshold(double delta_v, double rho, Eigen::Index J) {
    detail::check_denoiser_args(delta_v, rho);
    return 0.5 * static_cast<double>(J) + delta_v * std::log((1.0 - rho) / rho);
}

double mae_median(double pi, double mu, double sigma) {
    if (!(pi >= 0.0 && pi <= 1.0) || !(sigma > 0.0)) {
        throw ParameterError("mae_median requires pi in [0, 1] and sigma > 0");
    }
    const double below_zero = pi * normal_cdf(-mu / sigma);  // F(0-)
    const double at_zero = below_zero + (1.0 - pi);          // F(0)
    if (below_zero < 0.5 && 0.5 <= at_zero) {
        return 0.0;
    }
    // Continuous branch: solve F(t) = 1/2 on the Gaussian part.
    const double p = below_zero >= 0.5 ? 0.5 / pi : (pi - 0.5) / pi;
    return mu + sigma * normal_quantile(p);
}

Eigen::MatrixXd apply_metric(const GampOutput& output, const MetricSpec& metric, const SignalPrior& prior) {
    const Eigen::Index N = output.q.rows();
    const Eigen::Index J = output.q.cols();
    const double dv = output.delta_v;
    const bool bg = prior.kind == PriorKind::BernoulliGaussian;
    Eigen::MatrixXd est;
    switch (metric.kind) {
    case MetricKind::MSE:
        est.resize(N, J);
        for (Eigen::Index n = 0; n < N; ++n) {
            est.row(n) = bg ? bg_denoise(dv, output.q.row(n), prior.rho).mean
                            : bernoulli_denoise(dv, output.q.row(n), prior.rho).mean;
        }
        break;
    case MetricKind::MWSE:
        est.resize(N, 1);
        if (metric.beta <= 0.0 || metric.beta >= 1.0) {
            est.setConstant(metric.beta <= 0.0 ? 1.0 : 0.0);
            break;
        }
        for (Eigen::Index n = 0; n < N; ++n) {
            bool active;
            if (bg) {
                active = mwse_estimate(output.q.row(n), dv, prior.rho, metric.beta);
            } else {
                // (1 - beta) pi > beta (1 - pi), compared in log-odds.
                const double log_odds = (output.q.row(n).sum() - 0.5 * static_cast<double>(J)) / dv -
                                        std::log((1.0 - prior.rho) / prior.rho);
                active = log_odds > std::log(metric.beta / (1.0 - metric.beta));
            }
            est(n, 0) = active ? 1.0 : 0.0;
        }
        break;
    case MetricKind::Hamming:
        if (bg) {
            throw SpecError("the hamming metric requires the Bernoulli {0,1} prior");
        }
        est.resize(N, J);
        for (Eigen::Index n = 0; n < N; ++n) {
            est.row(n) = hamming_estimate(output.q.row(n), dv, prior.rho);
        }
        break;
    case MetricKind::MAE:
        if (!bg) {
            throw SpecError("the mae metric requires the Bernoulli-Gaussian prior");
        }
        est.resize(N, J);
        for (Eigen::Index n = 0; n < N; ++n) {
            est.row(n) = mae_estimate(output.q.row(n), dv, prior.rho);
        }
        break;
    }
    return est;
}

double compute_empirical_error(const Eigen::MatrixXd& x_true, const Eigen::MatrixXd& x_est, const MetricSpec& metric) {
    const Eigen::Index N = x_true.rows();
    const Eigen::Index J = x_true.cols();
    const bool support_only = metric.kind == MetricKind::MWSE && x_est.cols() == 1 && J != 1;
    if (x_est.rows() != N || (!support_only && x_est.cols() != J)) {
        throw ParameterError("estimate shape does not match the true signal");
    }
    if (N == 0) {
        throw ParameterError("empty signal");
    }
    double total = 0.0;
    switch (metric.kind) {
    case MetricKind::MSE:
        total = (x_true - x_est).squaredNorm();
        break;
    case MetricKind::MWSE:
        for (Eigen::Index n = 0; n < N; ++n) {
            const bool truth = (x_true.row(n).array() != 0.0).any();
            const bool guess = (x_est.row(n).array() != 0.0).any();
            if (guess && !truth) {
                total += metric.beta;
            } else if (!guess && truth) {
                total += 1.0 - metric.beta;
            }
        }
        break;
    case MetricKind::Hamming:
        for (Eigen::Index n = 0; n < N; ++n) {
            total += (x_true.row(n).array() != x_est.row(n).array()).any() ? 1.0 : 0.0;
        }
        break;
    case MetricKind::MAE:
        total = (x_true - x_est).cwiseAbs().sum() / static_cast<double>(J);
        break;
    }
    return total / static_cast<double>(N);
}

} // namespace mmv
