#pragma once

#include <filesystem>
#include <memory>

#include <Eigen/Dense>

namespace mmv {

/// Weights and scales of sum_u alpha_u Phi(w / sigma_u) approximating the
/// unit logistic sigmoid. Weights are nonnegative and sum to one, so the
/// mixture is itself a CDF and 1 - mixture(w) == mixture(-w).
struct SigmoidMixture {
    Eigen::VectorXd alphas;
    Eigen::VectorXd sigmas;
    double fit_error = 0.0;  // sup |mixture - sigmoid| on [-10, 10]

    Eigen::Index size() const { return alphas.size(); }
    double operator()(double w) const;
};

inline constexpr double kMixtureTolerance = 1e-3;

/// Nonnegative least-squares fit on a dense grid over [-10, 10] with sigma_u
/// log-spaced on [0.8, 4]. Throws NumericError when the sup-norm error
/// exceeds kMixtureTolerance.
SigmoidMixture build_sigmoid_mixture(int u_max);

/// Process-wide u_max = 8 fit, built once on first use.
std::shared_ptr<const SigmoidMixture> default_mixture();

void save_mixture(const SigmoidMixture& mix, const std::filesystem::path& path);
/// Reloads and re-validates against the sup-norm tolerance.
SigmoidMixture load_mixture(const std::filesystem::path& path);

struct GoutResult {
    double g = 0.0;                  // g_out(k, y, theta)
    double r = 0.0;                  // -d g_out / dk
    double posterior_mean_w = 0.0;
    double posterior_var_w = 0.0;
    double normalizer = 1.0;         // Z~; y=0 and y=1 values sum to one
    bool saturated = false;          // Z~ underflowed
};

GoutResult awgn_gout(double k, double y, double theta, double delta_z);

/// Posterior moments of w under N(w; k, theta) times the logistic
/// likelihood with slope `a`, the sigmoid replaced by `mix`. When the
/// evidence for y drops below 2e-2 the mixture's absolute fit error would
/// dominate, so those moments are integrated against the exact sigmoid.
GoutResult logistic_moments(double k, double y, double theta, double a, const SigmoidMixture& mix);

} // namespace mmv
