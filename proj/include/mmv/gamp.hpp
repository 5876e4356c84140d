#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Dense>

#include "mmv/errors.hpp"
#include "mmv/model.hpp"

namespace mmv {

struct SignalPrior {
    PriorKind kind = PriorKind::BernoulliGaussian;
    double rho = 0.1;
};

/// How the per-channel scalar variances are combined into one.
/// Mean keeps J = 1 and J > 1 on the same per-component scale; Sum follows
/// the literal line of the algorithm listing.
enum class DeltaAggregation { Mean, Sum };

/// Starting posterior variance of every entry. Prior uses the prior second
/// moment rho; NoiseScaled uses rho * delta_z as in the algorithm listing,
/// falling back to rho for channels without a noise variance.
enum class InitVariance { Prior, NoiseScaled };

struct GampConfig {
    int t_max = 200;
    double epsilon = 1e-8;
    DeltaAggregation delta_aggregation = DeltaAggregation::Mean;
    InitVariance init_variance = InitVariance::Prior;
    double damping = 0.0;  // weight on the previous iterate, in [0, 1)
    std::uint64_t seed = 0;
    int workers = 1;

    void validate() const;
};

struct GampOutput {
    Eigen::MatrixXd x_hat;   // N x J posterior means
    Eigen::MatrixXd q;       // N x J pseudo data of the last iteration
    Eigen::MatrixXd s;       // N x J posterior variances
    Eigen::VectorXd pi;      // N posterior activity probabilities
    Eigen::VectorXd delta_v_per_channel;
    double delta_v = 0.0;    // aggregated scalar-channel variance q came with
    int iterations = 0;
    bool converged = false;
    std::vector<TracePoint> trace;
};

/// GAMP for jointly sparse MMV signals: per-channel output updates, then
/// one super-symbol denoising pass per iteration. Throws DivergenceError
/// when a variance leaves (0, inf) or the estimate turns NaN.
GampOutput run_gamp(const MeasurementSet& measurements, const SignalPrior& prior, const GampConfig& config);

void write_trace_csv(const std::vector<TracePoint>& trace, const std::filesystem::path& path);

} // namespace mmv
