#include "mmv/model.hpp"

#include <cmath>
#include <string>

#include "mmv/errors.hpp"
#include "mmv/rng.hpp"

namespace mmv {

namespace {

double sigmoid(double t) {
    if (t >= 0.0) {
        return 1.0 / (1.0 + std::exp(-t));
    }
    const double e = std::exp(t);
    return e / (1.0 + e);
}

} // namespace

void validate(const ChannelModel& channel) {
    if (const auto* awgn = std::get_if<AwgnChannel>(&channel)) {
        if (!(awgn->delta_z > 0.0)) {
            throw ParameterError("AWGN noise variance must be positive, got " + std::to_string(awgn->delta_z));
        }
    } else {
        const auto& logit = std::get<LogisticChannel>(channel);
        if (!(logit.a > 0.0)) {
            throw ParameterError("logistic scaling factor must be positive, got " + std::to_string(logit.a));
        }
    }
}

SignalEnsemble generate_signal(Eigen::Index N, Eigen::Index J, double rho, PriorKind prior_kind,
                               std::uint64_t seed) {
    if (N < 1 || J < 1) {
        throw ParameterError("signal dimensions must be positive");
    }
    if (!(rho > 0.0 && rho < 1.0)) {
        throw ParameterError("sparsity rate must lie in (0, 1), got " + std::to_string(rho));
    }
    Rng rng(seed);
    SignalEnsemble out;
    out.rho = rho;
    out.prior_kind = prior_kind;
    out.entries = Eigen::MatrixXd::Zero(N, J);
    out.support.resize(N);
    // Support first, then amplitudes row by row, so a row's draws never
    // depend on J of a different ensemble sharing the seed.
    for (Eigen::Index n = 0; n < N; ++n) {
        out.support[n] = rng.bernoulli(rho);
    }
    for (Eigen::Index n = 0; n < N; ++n) {
        if (!out.support[n]) {
            continue;
        }
        for (Eigen::Index j = 0; j < J; ++j) {
            out.entries(n, j) = prior_kind == PriorKind::BernoulliGaussian ? rng.normal() : 1.0;
        }
    }
    return out;
}

Eigen::MatrixXd generate_matrix(Eigen::Index M, Eigen::Index N, MatrixKind kind, std::uint64_t seed,
                                bool normalize_rows) {
    if (M < 1 || N < 1) {
        throw ParameterError("matrix dimensions must be positive");
    }
    Rng rng(seed);
    const double scale = 1.0 / std::sqrt(static_cast<double>(N));
    // Row-major fill order keeps each row's draws contiguous in the stream.
    Eigen::MatrixXd A(M, N);
    for (Eigen::Index m = 0; m < M; ++m) {
        for (Eigen::Index n = 0; n < N; ++n) {
            A(m, n) = kind == MatrixKind::GaussianUnitRow ? scale * rng.normal() : scale * rng.sign();
        }
    }
    if (kind == MatrixKind::GaussianUnitRow && normalize_rows) {
        for (Eigen::Index m = 0; m < M; ++m) {
            A.row(m) /= A.row(m).norm();
        }
    }
    return A;
}

Eigen::VectorXd measure(const Eigen::MatrixXd& A, const Eigen::Ref<const Eigen::VectorXd>& x,
                        const ChannelModel& channel, std::uint64_t seed) {
    if (A.cols() != x.size()) {
        throw ParameterError("measure: matrix has " + std::to_string(A.cols()) + " columns but signal has " +
                             std::to_string(x.size()) + " entries");
    }
    validate(channel);
    Rng rng(seed);
    Eigen::VectorXd y = A * x;
    if (const auto* awgn = std::get_if<AwgnChannel>(&channel)) {
        const double sd = std::sqrt(awgn->delta_z);
        for (Eigen::Index m = 0; m < y.size(); ++m) {
            y[m] += sd * rng.normal();
        }
    } else {
        const double a = std::get<LogisticChannel>(channel).a;
        for (Eigen::Index m = 0; m < y.size(); ++m) {
            y[m] = rng.uniform() < sigmoid(a * y[m]) ? 1.0 : 0.0;
        }
    }
    return y;
}

ProblemInstance make_instance(const InstanceParams& params, std::uint64_t seed) {
    if (params.M < 1) {
        throw ParameterError("number of measurements must be positive");
    }
    ProblemInstance inst;
    inst.params = params;
    inst.seed = seed;
    inst.signal = generate_signal(params.N, params.J, params.rho, params.prior_kind,
                                  derive_seed(seed, {stream::signal}));
    inst.measurements.channel = params.channel;
    if (auto* logit = std::get_if<LogisticChannel>(&inst.measurements.channel); logit && !logit->mixture) {
        logit->mixture = default_mixture();
    }
    for (Eigen::Index j = 0; j < params.J; ++j) {
        const auto uj = static_cast<std::uint64_t>(j);
        inst.measurements.matrices.push_back(generate_matrix(
            params.M, params.N, params.matrix_kind, derive_seed(seed, {stream::matrix, uj}), params.normalize_rows));
        inst.measurements.observations.push_back(measure(inst.measurements.matrices.back(),
                                                         inst.signal.entries.col(j), params.channel,
                                                         derive_seed(seed, {stream::noise, uj})));
    }
    return inst;
}

} // namespace mmv
