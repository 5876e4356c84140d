#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace mmv {

struct LimitQuery {
    double delta_v = 1.0;
    double rho = 0.1;
    Eigen::Index J = 1;
    std::optional<double> beta;  // MWSE only
};

enum class LimitMethod { ClosedForm, Quadrature, MonteCarlo };

std::string to_string(LimitMethod method);

struct LimitResult {
    double value = 0.0;
    std::optional<double> p_false_alarm;
    std::optional<double> p_miss;
    LimitMethod method = LimitMethod::ClosedForm;
    long n_samples = 0;      // Monte Carlo only
    double std_error = 0.0;  // Monte Carlo only
};

/// Minimum weighted support error at scalar-channel variance delta_v:
/// beta (1 - rho) P(false alarm) + (1 - beta) rho P(miss), with both
/// probabilities as regularized incomplete gamma functions.
LimitResult mmwse(const LimitQuery& query);

struct RocPoint {
    double threshold = 0.0;
    double fpr = 0.0;
    double tpr = 0.0;
};

/// Operating points of the squared-norm detector |q|^2 > t. Thresholds must be
/// nonnegative and sorted ascending.
std::vector<RocPoint> roc_curve(double delta_v, Eigen::Index J, std::span<const double> thresholds);

/// `points` thresholds from 0 to the far tail of the active-hypothesis law.
std::vector<double> default_roc_grid(double delta_v, Eigen::Index J, int points = 200);

/// Trapezoid area under (fpr, tpr), closing the curve at (0, 0) and (1, 1).
double roc_area(std::span<const RocPoint> curve);

/// Minimum mean absolute error per component, by Monte Carlo over the
/// pseudo data with the inner posterior expectation in closed form.
LimitResult mmae(const LimitQuery& query, long n_samples, std::uint64_t seed);

/// J = 1 minimum mean absolute error by deterministic quadrature over q.
LimitResult mmae_quadrature(const LimitQuery& query);

/// Posterior-mean MSE per super-symbol of the Bernoulli-Gaussian scalar
/// channel, via a 1-D radial integral. Strictly increasing in delta_v,
/// bounded by J rho.
double mmse_of_delta(double delta_v, double rho, Eigen::Index J);

struct Inversion {
    double delta_v = 0.0;
    bool saturated = false;  // target too close to J rho; delta_v capped
};

inline constexpr double kMaxDeltaV = 1e12;

/// delta_v with mmse_of_delta(delta_v) = target, by bisection in log delta_v.
Inversion invert_mmse(double target_mmse, double rho, Eigen::Index J);

/// Fixed point of delta_v = (delta_z + mmse_of_delta(delta_v) / J) / R,
/// iterated from (delta_z + rho) / R. Heuristic stand-in for the replica
/// prediction: returns the fixed point reached from the uninformed start.
double state_evolution_delta(double R, double rho, Eigen::Index J, double delta_z);

} // namespace mmv
