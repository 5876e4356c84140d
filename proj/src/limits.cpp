#include "mmv/limits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "mmv/denoisers.hpp"
#include "mmv/errors.hpp"
#include "mmv/metrics.hpp"
#include "mmv/normal.hpp"
#include "mmv/rng.hpp"

namespace mmv {

namespace {

using boost::math::quadrature::gauss_kronrod;

void check_query(double delta_v, double rho, Eigen::Index J) {
    if (!(delta_v > 0.0) || !std::isfinite(delta_v)) {
        throw ParameterError("delta_v must be positive and finite");
    }
    if (!(rho > 0.0 && rho <= 1.0)) {
        throw ParameterError("rho must lie in (0, 1]");
    }
    if (J < 1) {
        throw ParameterError("J must be at least 1");
    }
}

// E[|x - t|] for x ~ (1 - pi) delta_0 + pi N(mu, sigma^2).
double posterior_abs_loss(double pi, double mu, double sigma, double t) {
    const double d = (mu - t) / sigma;
    return (1.0 - pi) * std::abs(t) + pi * sigma * (2.0 * normal_pdf(d) + d * (2.0 * normal_cdf(d) - 1.0));
}

// Expected per-component absolute loss of the posterior median given q (J=1).
double scalar_mae_loss(double q, double delta_v, double rho) {
    const double shrink = 1.0 / (1.0 + delta_v);
    const double sigma = std::sqrt(delta_v * shrink);
    const double pi = bg_active_probability(delta_v, q * q, rho, Eigen::Index{1});
    const double mu = q * shrink;
    return posterior_abs_loss(pi, mu, sigma, mae_median(pi, mu, sigma));
}

// E over g ~ chi^2_J of h(g), with g = u^2 to remove the origin singularity.
template <typename F>
double chi_square_expectation(Eigen::Index J, F&& h, double* error_out) {
    const double half_j = 0.5 * static_cast<double>(J);
    const double log_norm = -half_j * std::numbers::ln2 - std::lgamma(half_j) + std::numbers::ln2;
    auto integrand = [&](double u) {
        if (u <= 0.0) {
            return J == 1 ? std::exp(log_norm) * h(0.0) : 0.0;
        }
        const double g = u * u;
        return std::exp(log_norm + (static_cast<double>(J) - 1.0) * std::log(u) - 0.5 * g) * h(g);
    };
    double err = 0.0;
    double l1 = 0.0;
    const double value = gauss_kronrod<double, 31>::integrate(integrand, 0.0, std::numeric_limits<double>::infinity(),
                                                              20, 1e-13, &err, &l1);
    if (error_out) {
        *error_out = err;
    }
    return value;
}

} // namespace

std::string to_string(LimitMethod method) {
    switch (method) {
    case LimitMethod::ClosedForm:
        return "closed_form";
    case LimitMethod::Quadrature:
        return "quadrature";
    case LimitMethod::MonteCarlo:
        return "monte_carlo";
    }
    return "unknown";
}

LimitResult mmwse(const LimitQuery& query) {
    check_query(query.delta_v, query.rho, query.J);
    if (!query.beta) {
        throw ParameterError("mmwse requires beta");
    }
    const double beta = *query.beta;
    if (!(beta >= 0.0 && beta <= 1.0)) {
        throw ParameterError("beta must lie in [0, 1]");
    }
    const double dv = query.delta_v;
    const double half_j = 0.5 * static_cast<double>(query.J);
    double p_fa = 1.0;
    double p_miss = 0.0;
    if (beta >= 1.0) {
        p_fa = 0.0;
        p_miss = 1.0;
    } else if (beta > 0.0 && query.rho < 1.0) {
        const double tau = mwse_threshold(dv, query.rho, beta, query.J);
        if (tau > 0.0) {
            p_fa = boost::math::gamma_q(half_j, tau / (2.0 * dv));
            p_miss = boost::math::gamma_p(half_j, tau / (2.0 * (1.0 + dv)));
        }
    }
    LimitResult out;
    out.value = beta * (1.0 - query.rho) * p_fa + (1.0 - beta) * query.rho * p_miss;
    out.p_false_alarm = p_fa;
    out.p_miss = p_miss;
    out.method = LimitMethod::ClosedForm;
    return out;
}

std::vector<RocPoint> roc_curve(double delta_v, Eigen::Index J, std::span<const double> thresholds) {
    check_query(delta_v, 0.5, J);
    const double half_j = 0.5 * static_cast<double>(J);
    std::vector<RocPoint> out;
    out.reserve(thresholds.size());
    double previous = -std::numeric_limits<double>::infinity();
    for (double t : thresholds) {
        if (!(t >= 0.0) || t < previous) {
            throw ParameterError("ROC thresholds must be nonnegative and sorted ascending");
        }
        previous = t;
        out.push_back({t, boost::math::gamma_q(half_j, t / (2.0 * delta_v)),
                       boost::math::gamma_q(half_j, t / (2.0 * (1.0 + delta_v)))});
    }
    return out;
}

std::vector<double> default_roc_grid(double delta_v, Eigen::Index J, int points) {
    check_query(delta_v, 0.5, J);
    if (points < 3) {
        throw ParameterError("ROC grid needs at least 3 points");
    }
    const double half_j = 0.5 * static_cast<double>(J);
    // Log-spaced between the point where the inactive law still has
    // probability ~1 above it and where the active law has ~0 above it.
    const double lo = 2.0 * delta_v * boost::math::gamma_p_inv(half_j, 1e-9);
    const double hi = 2.0 * (1.0 + delta_v) * boost::math::gamma_q_inv(half_j, 1e-12);
    std::vector<double> grid{0.0};
    const int n = points - 1;
    for (int i = 0; i < n; ++i) {
        grid.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
    }
    return grid;
}

double roc_area(std::span<const RocPoint> curve) {
    std::vector<std::pair<double, double>> pts{{0.0, 0.0}, {1.0, 1.0}};
    for (const auto& p : curve) {
        pts.emplace_back(p.fpr, p.tpr);
    }
    std::sort(pts.begin(), pts.end());
    double area = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        area += 0.5 * (pts[i].first - pts[i - 1].first) * (pts[i].second + pts[i - 1].second);
    }
    return area;
}

LimitResult mmae(const LimitQuery& query, long n_samples, std::uint64_t seed) {
    check_query(query.delta_v, query.rho, query.J);
    if (n_samples < 100) {
        throw ParameterError("mmae needs at least 100 samples");
    }
    const double dv = query.delta_v;
    const double sd = std::sqrt(dv);
    const double shrink = 1.0 / (1.0 + dv);
    const double sigma = std::sqrt(dv * shrink);
    const Eigen::Index J = query.J;
    Rng rng(seed);
    Eigen::VectorXd q(J);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (long s = 0; s < n_samples; ++s) {
        const bool active = rng.bernoulli(query.rho);
        for (Eigen::Index j = 0; j < J; ++j) {
            q[j] = (active ? rng.normal() : 0.0) + sd * rng.normal();
        }
        const double pi = bg_active_probability(dv, q.squaredNorm(), query.rho, J);
        double loss = 0.0;
        for (Eigen::Index j = 0; j < J; ++j) {
            const double mu = q[j] * shrink;
            loss += posterior_abs_loss(pi, mu, sigma, mae_median(pi, mu, sigma));
        }
        loss /= static_cast<double>(J);
        sum += loss;
        sum_sq += loss * loss;
    }
    const double n = static_cast<double>(n_samples);
    const double mean = sum / n;
    LimitResult out;
    out.value = mean;
    out.method = LimitMethod::MonteCarlo;
    out.n_samples = n_samples;
    out.std_error = std::sqrt(std::max(0.0, sum_sq / n - mean * mean) / (n - 1.0));
    return out;
}

LimitResult mmae_quadrature(const LimitQuery& query) {
    check_query(query.delta_v, query.rho, query.J);
    if (query.J != 1) {
        throw ParameterError("mmae_quadrature is defined for J = 1 only");
    }
    const double dv = query.delta_v;
    const double rho = query.rho;
    const double shrink = 1.0 / (1.0 + dv);
    const double sigma = std::sqrt(dv * shrink);
    auto density = [&](double q) {
        return (1.0 - rho) * normal_pdf(q / std::sqrt(dv)) / std::sqrt(dv) +
               rho * normal_pdf(q / std::sqrt(1.0 + dv)) / std::sqrt(1.0 + dv);
    };
    auto integrand = [&](double q) { return density(q) * scalar_mae_loss(q, dv, rho); };

    // The median leaves the spike where pi * Phi(mu / sigma) = 1/2; the
    // integrand has a kink there, so split the (symmetric) half-line at it.
    auto exit_gap = [&](double q) {
        return bg_active_probability(dv, q * q, rho, Eigen::Index{1}) * normal_cdf(q * shrink / sigma) - 0.5;
    };
    double lo = 0.0;
    double hi = 1.0;
    while (exit_gap(hi) < 0.0 && hi < 1e8) {
        hi *= 2.0;
    }
    for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (exit_gap(mid) < 0.0 ? lo : hi) = mid;
    }
    const double kink = 0.5 * (lo + hi);
    double err1 = 0.0, err2 = 0.0;
    const double inner = gauss_kronrod<double, 31>::integrate(integrand, 0.0, kink, 20, 1e-13, &err1);
    const double outer = gauss_kronrod<double, 31>::integrate(integrand, kink, std::numeric_limits<double>::infinity(),
                                                              20, 1e-13, &err2);
    const double value = 2.0 * (inner + outer);
    if (!(err1 + err2 <= 1e-8 * std::max(value, 1e-300))) {
        throw NumericError("mmae quadrature reached error " + std::to_string(err1 + err2));
    }
    LimitResult out;
    out.value = value;
    out.method = LimitMethod::Quadrature;
    return out;
}

double mmse_of_delta(double delta_v, double rho, Eigen::Index J) {
    check_query(delta_v, rho, J);
    const double dv = delta_v;
    const double shrink = 1.0 / (1.0 + dv);
    const double j = static_cast<double>(J);
    // Posterior trace covariance given |q|^2 = r; every term is nonnegative,
    // so small MMSE values keep their relative precision.
    auto trace_cov = [&](double r) {
        const double pi = bg_active_probability(dv, r, rho, J);
        return j * pi * dv * shrink + pi * (1.0 - pi) * r * shrink * shrink;
    };
    double err_inactive = 0.0;
    double err_active = 0.0;
    const double inactive =
        rho < 1.0 ? chi_square_expectation(J, [&](double g) { return trace_cov(dv * g); }, &err_inactive) : 0.0;
    const double active = chi_square_expectation(J, [&](double g) { return trace_cov((1.0 + dv) * g); }, &err_active);
    const double value = (1.0 - rho) * inactive + rho * active;
    const double err = (1.0 - rho) * err_inactive + rho * err_active;
    if (!(err <= 1e-8 * value) && value > 0.0) {
        throw NumericError("mmse_of_delta quadrature reached relative error " + std::to_string(err / value));
    }
    return value;
}

Inversion invert_mmse(double target_mmse, double rho, Eigen::Index J) {
    check_query(1.0, rho, J);
    const double ceiling = static_cast<double>(J) * rho;
    if (!(target_mmse > 0.0 && target_mmse < ceiling)) {
        throw ParameterError("target MMSE must lie in (0, J rho) = (0, " + std::to_string(ceiling) + ")");
    }
    const double tol = 1e-10 * ceiling;
    double lo = std::log(1e-15);
    double hi = std::log(kMaxDeltaV);
    if (mmse_of_delta(kMaxDeltaV, rho, J) < target_mmse - tol) {
        return {kMaxDeltaV, true};
    }
    double mid = 0.5 * (lo + hi);
    for (int i = 0; i < 400; ++i) {
        mid = 0.5 * (lo + hi);
        const double gap = mmse_of_delta(std::exp(mid), rho, J) - target_mmse;
        if (std::abs(gap) <= tol) {
            return {std::exp(mid), false};
        }
        (gap < 0.0 ? lo : hi) = mid;
        if (hi - lo < 1e-15) {
            break;
        }
    }
    throw NumericError("invert_mmse did not reach tolerance");
}

double state_evolution_delta(double R, double rho, Eigen::Index J, double delta_z) {
    if (!(R > 0.0) || !(delta_z >= 0.0)) {
        throw ParameterError("state evolution needs R > 0 and delta_z >= 0");
    }
    check_query(1.0, rho, J);
    const double j = static_cast<double>(J);
    double dv = (delta_z + rho) / R;
    for (int it = 0; it < 10000; ++it) {
        const double next = (delta_z + mmse_of_delta(dv, rho, J) / j) / R;
        if (!(next > 0.0)) {
            // Noiseless perfect recovery: the fixed point is zero.
            return 0.0;
        }
        if (std::abs(next - dv) <= 1e-10 * next) {
            return next;
        }
        if (next < 1e-200) {
            return next;
        }
        dv = next;
    }
    throw NumericError("state evolution did not converge in 10000 iterations");
}

} // namespace mmv
