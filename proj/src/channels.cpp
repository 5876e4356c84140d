#include "mmv/channels.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <json.hpp>

#include "mmv/errors.hpp"
#include "mmv/normal.hpp"

namespace mmv {

namespace {

constexpr double kFitHalfWidth = 10.0;
constexpr int kFitGridPoints = 8001;
constexpr double kSigmaLow = 0.8;
constexpr double kSigmaHigh = 4.0;

double sigmoid(double t) {
    if (t >= 0.0) {
        return 1.0 / (1.0 + std::exp(-t));
    }
    const double e = std::exp(t);
    return e / (1.0 + e);
}

// Below this evidence the mixture's absolute fit error is no longer small
// relative to the likelihood, so the moments come from the exact sigmoid.
constexpr double kExactEvidence = 2e-2;

double log_sigmoid(double t) { return t >= 0.0 ? -std::log1p(std::exp(-t)) : t - std::log1p(std::exp(t)); }

struct TiltedMoments {
    double mean;
    double var;
};

// Moments of N(w; k, theta) * sigmoid(a w) by adaptive quadrature around the
// mode. The density is log-concave with curvature at least 1/theta, so
// 12 sqrt(theta) on either side of the mode holds all of the mass.
TiltedMoments exact_tilted_moments(double k, double theta, double a) {
    auto dlog = [&](double w) { return a * sigmoid(-a * w) - (w - k) / theta; };
    double lo = k;
    double hi = k + a * theta;
    for (int i = 0; i < 200 && hi - lo > 1e-14 * (1.0 + std::abs(hi)); ++i) {
        const double mid = 0.5 * (lo + hi);
        (dlog(mid) > 0.0 ? lo : hi) = mid;
    }
    const double mode = 0.5 * (lo + hi);
    const double peak = log_sigmoid(a * mode) - 0.5 * (mode - k) * (mode - k) / theta;
    auto density = [&](double w) {
        return std::exp(log_sigmoid(a * w) - 0.5 * (w - k) * (w - k) / theta - peak);
    };
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    const double half = 12.0 * std::sqrt(theta);
    auto integrate = [&](auto&& f) {
        return GK::integrate(f, mode - half, mode, 15, 1e-13) + GK::integrate(f, mode, mode + half, 15, 1e-13);
    };
    const double z = integrate(density);
    const double m1 = integrate([&](double w) { return (w - mode) * density(w); }) / z;
    const double m2 = integrate([&](double w) { return (w - mode) * (w - mode) * density(w); }) / z;
    return {mode + m1, std::max(0.0, m2 - m1 * m1)};
}

// Lawson-Hanson active-set NNLS for the small, well-conditioned systems here.
Eigen::VectorXd nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
    const Eigen::Index n = A.cols();
    const double tol = 1e-12 * A.norm() * b.norm();
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    std::vector<bool> passive(static_cast<std::size_t>(n), false);

    auto solve_passive = [&]() {
        std::vector<Eigen::Index> idx;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (passive[static_cast<std::size_t>(i)]) {
                idx.push_back(i);
            }
        }
        Eigen::MatrixXd Ap(A.rows(), static_cast<Eigen::Index>(idx.size()));
        for (std::size_t c = 0; c < idx.size(); ++c) {
            Ap.col(static_cast<Eigen::Index>(c)) = A.col(idx[c]);
        }
        const Eigen::VectorXd zp = Ap.colPivHouseholderQr().solve(b);
        Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
        for (std::size_t c = 0; c < idx.size(); ++c) {
            z[idx[c]] = zp[static_cast<Eigen::Index>(c)];
        }
        return z;
    };

    for (int outer = 0; outer < 3 * n + 10; ++outer) {
        const Eigen::VectorXd w = A.transpose() * (b - A * x);
        Eigen::Index best = -1;
        double best_w = tol;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (!passive[static_cast<std::size_t>(i)] && w[i] > best_w) {
                best_w = w[i];
                best = i;
            }
        }
        if (best < 0) {
            break;
        }
        passive[static_cast<std::size_t>(best)] = true;
        for (int inner = 0; inner < 3 * n + 10; ++inner) {
            const Eigen::VectorXd z = solve_passive();
            double step = 1.0;
            bool feasible = true;
            for (Eigen::Index i = 0; i < n; ++i) {
                if (passive[static_cast<std::size_t>(i)] && z[i] <= 0.0) {
                    feasible = false;
                    step = std::min(step, x[i] / (x[i] - z[i]));
                }
            }
            if (feasible) {
                x = z;
                break;
            }
            x += step * (z - x);
            for (Eigen::Index i = 0; i < n; ++i) {
                if (passive[static_cast<std::size_t>(i)] && x[i] <= 1e-15) {
                    passive[static_cast<std::size_t>(i)] = false;
                    x[i] = 0.0;
                }
            }
        }
    }
    return x;
}

double sup_error(const SigmoidMixture& mix, int points) {
    double worst = 0.0;
    for (int i = 0; i < points; ++i) {
        const double w = -kFitHalfWidth + 2.0 * kFitHalfWidth * i / (points - 1);
        worst = std::max(worst, std::abs(mix(w) - sigmoid(w)));
    }
    return worst;
}

void check_fit(const SigmoidMixture& mix) {
    if (!(mix.fit_error <= kMixtureTolerance)) {
        throw NumericError("sigmoid mixture with u_max=" + std::to_string(mix.size()) +
                           " reaches sup-norm error " + std::to_string(mix.fit_error) + " > " +
                           std::to_string(kMixtureTolerance));
    }
}

} // namespace

double SigmoidMixture::operator()(double w) const {
    double acc = 0.0;
    for (Eigen::Index u = 0; u < alphas.size(); ++u) {
        acc += alphas[u] * normal_cdf(w / sigmas[u]);
    }
    return acc;
}

SigmoidMixture build_sigmoid_mixture(int u_max) {
    if (u_max < 1) {
        throw ParameterError("u_max must be at least 1");
    }
    SigmoidMixture mix;
    mix.sigmas.resize(u_max);
    if (u_max == 1) {
        mix.sigmas[0] = std::sqrt(kSigmaLow * kSigmaHigh);
    } else {
        for (int u = 0; u < u_max; ++u) {
            mix.sigmas[u] = kSigmaLow * std::pow(kSigmaHigh / kSigmaLow, static_cast<double>(u) / (u_max - 1));
        }
    }

    // A heavily weighted extra row pins sum(alpha) = 1.
    constexpr double pin = 1e4;
    Eigen::MatrixXd basis(kFitGridPoints + 1, u_max);
    Eigen::VectorXd target(kFitGridPoints + 1);
    for (int i = 0; i < kFitGridPoints; ++i) {
        const double w = -kFitHalfWidth + 2.0 * kFitHalfWidth * i / (kFitGridPoints - 1);
        for (int u = 0; u < u_max; ++u) {
            basis(i, u) = normal_cdf(w / mix.sigmas[u]);
        }
        target[i] = sigmoid(w);
    }
    basis.row(kFitGridPoints).setConstant(pin);
    target[kFitGridPoints] = pin;

    mix.alphas = nnls(basis, target);
    mix.alphas /= mix.alphas.sum();
    mix.fit_error = sup_error(mix, 4 * kFitGridPoints);
    check_fit(mix);
    return mix;
}

std::shared_ptr<const SigmoidMixture> default_mixture() {
    static const std::shared_ptr<const SigmoidMixture> mix =
        std::make_shared<const SigmoidMixture>(build_sigmoid_mixture(8));
    return mix;
}

void save_mixture(const SigmoidMixture& mix, const std::filesystem::path& path) {
    nlohmann::json j;
    j["u_max"] = mix.size();
    j["alphas"] = std::vector<double>(mix.alphas.data(), mix.alphas.data() + mix.alphas.size());
    j["sigmas"] = std::vector<double>(mix.sigmas.data(), mix.sigmas.data() + mix.sigmas.size());
    j["fit_error"] = mix.fit_error;
    std::ofstream out(path);
    if (!out) {
        throw ParameterError("cannot write mixture file " + path.string());
    }
    out << j.dump(2) << '\n';
}

SigmoidMixture load_mixture(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParameterError("cannot read mixture file " + path.string());
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw SpecError("mixture file " + path.string() + ": " + e.what());
    }
    const auto alphas = j.at("alphas").get<std::vector<double>>();
    const auto sigmas = j.at("sigmas").get<std::vector<double>>();
    if (alphas.size() != sigmas.size() || alphas.empty() ||
        j.at("u_max").get<std::size_t>() != alphas.size()) {
        throw SpecError("mixture file " + path.string() + ": inconsistent u_max/alphas/sigmas");
    }
    SigmoidMixture mix;
    mix.alphas = Eigen::Map<const Eigen::VectorXd>(alphas.data(), static_cast<Eigen::Index>(alphas.size()));
    mix.sigmas = Eigen::Map<const Eigen::VectorXd>(sigmas.data(), static_cast<Eigen::Index>(sigmas.size()));
    if ((mix.alphas.array() < 0.0).any() || (mix.sigmas.array() <= 0.0).any()) {
        throw SpecError("mixture file " + path.string() + ": weights must be >= 0 and scales > 0");
    }
    mix.fit_error = sup_error(mix, 4 * kFitGridPoints);
    check_fit(mix);
    return mix;
}

GoutResult awgn_gout(double k, double y, double theta, double delta_z) {
    if (!(theta > 0.0) || !(delta_z > 0.0)) {
        throw ParameterError("awgn_gout requires theta > 0 and delta_z > 0");
    }
    GoutResult out;
    const double total = delta_z + theta;
    out.g = (y - k) / total;
    out.r = 1.0 / total;
    out.posterior_mean_w = k + theta * out.g;
    out.posterior_var_w = theta * delta_z / total;
    out.normalizer = normal_pdf((y - k) / std::sqrt(total)) / std::sqrt(total);
    return out;
}

GoutResult logistic_moments(double k, double y, double theta, double a, const SigmoidMixture& mix) {
    if (!(theta > 0.0) || !(a > 0.0)) {
        throw ParameterError("logistic_moments requires theta > 0 and a > 0");
    }
    if (y != 0.0 && y != 1.0) {
        throw ParameterError("logistic observation must be 0 or 1");
    }
    // y = 0 is the mirror image of y = 1: 1 - mixture(w) = mixture(-w).
    const double sign = y == 1.0 ? 1.0 : -1.0;
    const double kk = sign * k;

    // The posterior is a mixture over u of N(k, theta) tilted by Phi(w / s_u);
    // component u has mean kk + theta*lambda_u/c_u and the weights are
    // alpha_u Phi(eta_u), kept in the log domain.
    const Eigen::Index U = mix.size();
    Eigen::VectorXd log_w(U), slope(U), curvature(U);
    double direct_sum = 0.0;  // sum alpha_u Phi(eta_u) at the unmirrored k
    double log_max = -std::numeric_limits<double>::infinity();
    for (Eigen::Index u = 0; u < U; ++u) {
        const double s = mix.sigmas[u] / a;
        const double c2 = s * s + theta;
        const double c = std::sqrt(c2);
        const double eta = kk / c;
        direct_sum += mix.alphas[u] * normal_cdf(k / c);
        log_w[u] = mix.alphas[u] > 0.0 ? std::log(mix.alphas[u]) + log_normal_cdf(eta)
                                       : -std::numeric_limits<double>::infinity();
        log_max = std::max(log_max, log_w[u]);
        const double lambda = inverse_mills(eta);
        slope[u] = lambda / c;
        curvature[u] = lambda * (eta + lambda) / c2;
    }
    const Eigen::VectorXd weights = (log_w.array() - log_max).exp().matrix();
    const Eigen::VectorXd post = weights / weights.sum();

    // g = E[slope], r = E[curvature] - Var[slope]: both stay accurate as theta -> 0.
    const double mean_slope = post.dot(slope);
    double r = post.dot(curvature) - post.dot((slope.array() - mean_slope).square().matrix());
    r = std::clamp(r, 0.0, 1.0 / theta);

    GoutResult out;
    out.normalizer = y == 1.0 ? direct_sum : 1.0 - direct_sum;
    if (out.normalizer < kExactEvidence) {
        const TiltedMoments tm = exact_tilted_moments(kk, theta, a);
        out.g = sign * (tm.mean - kk) / theta;
        out.r = std::clamp((1.0 - tm.var / theta) / theta, 0.0, 1.0 / theta);
        out.posterior_mean_w = k + theta * out.g;
        out.posterior_var_w = std::min(tm.var, theta);  // a log-concave tilt never widens
        out.saturated = !(out.normalizer > 1e-300);
        return out;
    }
    out.g = sign * mean_slope;
    out.r = r;
    out.posterior_mean_w = k + theta * out.g;
    out.posterior_var_w = std::max(0.0, theta - theta * theta * r);
    out.saturated = !(out.normalizer > 1e-300);
    return out;
}

} // namespace mmv
