#include "mmv/gamp.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <string>

#include "mmv/channels.hpp"
#include "mmv/csv.hpp"
#include "mmv/denoisers.hpp"
#include "mmv/parallel.hpp"

namespace mmv {

void GampConfig::validate() const {
    if (t_max < 1) {
        throw ParameterError("t_max must be at least 1");
    }
    if (!(epsilon > 0.0)) {
        throw ParameterError("epsilon must be positive");
    }
    if (!(damping >= 0.0 && damping < 1.0)) {
        throw ParameterError("damping must lie in [0, 1)");
    }
    if (workers < 1) {
        throw ParameterError("workers must be at least 1");
    }
}

namespace {

struct ChannelWork {
    const Eigen::MatrixXd* A = nullptr;
    const Eigen::VectorXd* y = nullptr;
    Eigen::MatrixXd A2;       // elementwise square
    Eigen::VectorXd row_sq;   // row sums of A2
    Eigen::VectorXd h;
    Eigen::VectorXd r;
    Eigen::VectorXd theta;
    Eigen::VectorXd k;
};

void check_dimensions(const MeasurementSet& ms) {
    if (ms.matrices.empty()) {
        throw ParameterError("measurement set has no channels");
    }
    if (ms.observations.size() != ms.matrices.size()) {
        throw ParameterError("measurement set has " + std::to_string(ms.matrices.size()) + " matrices but " +
                             std::to_string(ms.observations.size()) + " observation vectors");
    }
    const auto M = ms.matrices.front().rows();
    const auto N = ms.matrices.front().cols();
    for (std::size_t j = 0; j < ms.matrices.size(); ++j) {
        if (ms.matrices[j].rows() != M || ms.matrices[j].cols() != N) {
            throw ParameterError("all channel matrices must share dimensions");
        }
        if (ms.observations[j].size() != M) {
            throw ParameterError("observation length does not match matrix rows");
        }
    }
}

} // namespace

GampOutput run_gamp(const MeasurementSet& measurements, const SignalPrior& prior, const GampConfig& config) {
    config.validate();
    check_dimensions(measurements);
    validate(measurements.channel);
    if (!(prior.rho > 0.0 && prior.rho < 1.0)) {
        throw ParameterError("prior sparsity rate must lie in (0, 1)");
    }

    const Eigen::Index J = measurements.channels();
    const Eigen::Index M = measurements.rows();
    const Eigen::Index N = measurements.cols();
    const int workers = config.workers;

    const auto* awgn = std::get_if<AwgnChannel>(&measurements.channel);
    const LogisticChannel* logit = std::get_if<LogisticChannel>(&measurements.channel);
    std::shared_ptr<const SigmoidMixture> mixture;
    if (logit) {
        mixture = logit->mixture ? logit->mixture : default_mixture();
    }

    std::vector<ChannelWork> work(static_cast<std::size_t>(J));
    for (Eigen::Index j = 0; j < J; ++j) {
        auto& w = work[static_cast<std::size_t>(j)];
        w.A = &measurements.matrices[static_cast<std::size_t>(j)];
        w.y = &measurements.observations[static_cast<std::size_t>(j)];
        w.A2 = w.A->cwiseAbs2();
        w.row_sq = w.A2.rowwise().sum();
        w.h = Eigen::VectorXd::Zero(M);
        w.r = Eigen::VectorXd::Zero(M);
        w.theta = Eigen::VectorXd::Zero(M);
        w.k = *w.y;
    }

    GampOutput out;
    out.x_hat = Eigen::MatrixXd::Zero(N, J);
    out.q = Eigen::MatrixXd::Zero(N, J);
    const bool noise_scaled = awgn && config.init_variance == InitVariance::NoiseScaled;
    out.s = Eigen::MatrixXd::Constant(N, J, noise_scaled ? prior.rho * awgn->delta_z : prior.rho);
    out.pi = Eigen::VectorXd::Zero(N);
    out.delta_v_per_channel = Eigen::VectorXd::Zero(J);

    Eigen::MatrixXd x_prev(N, J);
    double change = std::numeric_limits<double>::infinity();
    int t = 1;
    const double d = config.damping;

    while (t < config.t_max && change > config.epsilon) {
        x_prev = out.x_hat;

        // Phase 1: channels are independent; each writes only its own column.
        parallel_for<Eigen::Index>(0, J, workers, [&](Eigen::Index lo, Eigen::Index hi) {
            for (Eigen::Index j = lo; j < hi; ++j) {
                auto& w = work[static_cast<std::size_t>(j)];
                w.theta.noalias() = w.A2 * out.s.col(j);
                w.k.noalias() = *w.A * out.x_hat.col(j);
                w.k -= w.theta.cwiseProduct(w.h);
                for (Eigen::Index m = 0; m < M; ++m) {
                    if (!std::isfinite(w.theta[m]) || !std::isfinite(w.k[m])) {
                        throw DivergenceError("GAMP diverged at iteration " + std::to_string(t) + ": channel " +
                                                  std::to_string(j) + " output estimate is not finite",
                                              out.trace);
                    }
                    const double theta_m = std::max(w.theta[m], std::numeric_limits<double>::min());
                    const GoutResult g = awgn ? awgn_gout(w.k[m], (*w.y)[m], theta_m, awgn->delta_z)
                                              : logistic_moments(w.k[m], (*w.y)[m], theta_m, logit->a, *mixture);
                    w.h[m] = (t > 1 && d > 0.0) ? (1.0 - d) * g.g + d * w.h[m] : g.g;
                    w.r[m] = g.r;
                }
                const double precision = w.r.dot(w.row_sq) / static_cast<double>(N);
                const double dv = 1.0 / precision;
                out.delta_v_per_channel[j] = dv;
                if (std::isfinite(dv) && dv > 0.0) {
                    out.q.col(j) = out.x_hat.col(j) + dv * (w.A->transpose() * w.h);
                }
            }
        });

        // Barrier: aggregate the scalar-channel variance.
        for (Eigen::Index j = 0; j < J; ++j) {
            const double dv = out.delta_v_per_channel[j];
            if (!std::isfinite(dv) || !(dv > 0.0)) {
                throw DivergenceError("GAMP diverged at iteration " + std::to_string(t) + ": channel " +
                                          std::to_string(j) + " scalar variance is " + std::to_string(dv),
                                      out.trace);
            }
        }
        const double dv_sum = out.delta_v_per_channel.sum();
        out.delta_v = config.delta_aggregation == DeltaAggregation::Mean ? dv_sum / static_cast<double>(J) : dv_sum;

        // Phase 2: super-symbols are independent; each writes only its own row.
        parallel_for<Eigen::Index>(0, N, workers, [&](Eigen::Index lo, Eigen::Index hi) {
            for (Eigen::Index n = lo; n < hi; ++n) {
                out.pi[n] = prior.kind == PriorKind::BernoulliGaussian
                                ? bg_denoise_into(out.q.row(n), out.delta_v, prior.rho, out.x_hat.row(n), out.s.row(n))
                                : bernoulli_denoise_into(out.q.row(n), out.delta_v, prior.rho, out.x_hat.row(n),
                                                         out.s.row(n));
            }
        });
        if (d > 0.0 && t > 1) {
            out.x_hat = (1.0 - d) * out.x_hat + d * x_prev;
        }
        if (!out.x_hat.allFinite()) {
            throw DivergenceError("GAMP produced a non-finite estimate at iteration " + std::to_string(t), out.trace);
        }

        ++t;
        change = (out.x_hat - x_prev).squaredNorm() / static_cast<double>(N * J);
        out.trace.push_back({t - 1, change, out.delta_v});
    }

    out.iterations = t - 1;
    out.converged = change <= config.epsilon;
    return out;
}

void write_trace_csv(const std::vector<TracePoint>& trace, const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) {
        throw ParameterError("cannot write trace file " + path.string());
    }
    os << "iteration,delta,delta_v\n";
    for (const auto& p : trace) {
        os << p.iteration << ',' << csv::num(p.change) << ',' << csv::num(p.delta_v) << '\n';
    }
}

} // namespace mmv
