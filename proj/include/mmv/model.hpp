#pragma once

#include <cstdint>
#include <memory>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "mmv/channels.hpp"

namespace mmv {

enum class PriorKind { BernoulliGaussian, BernoulliBinary };

/// N x J ensemble; row n is a super-symbol. Row n is nonzero iff support[n].
struct SignalEnsemble {
    Eigen::MatrixXd entries;
    Eigen::Array<bool, Eigen::Dynamic, 1> support;
    double rho = 0.0;
    PriorKind prior_kind = PriorKind::BernoulliGaussian;

    Eigen::Index length() const { return entries.rows(); }
    Eigen::Index channels() const { return entries.cols(); }
};

enum class MatrixKind { GaussianUnitRow, SignedBernoulli };

struct AwgnChannel {
    double delta_z = 0.0;
};

struct LogisticChannel {
    double a = 0.0;
    std::shared_ptr<const SigmoidMixture> mixture;  // null -> default_mixture()
};

using ChannelModel = std::variant<AwgnChannel, LogisticChannel>;

void validate(const ChannelModel& channel);

struct MeasurementSet {
    std::vector<Eigen::MatrixXd> matrices;      // J of them, each M x N
    std::vector<Eigen::VectorXd> observations;  // J of them, length M
    ChannelModel channel;

    Eigen::Index channels() const { return static_cast<Eigen::Index>(matrices.size()); }
    Eigen::Index rows() const { return matrices.empty() ? 0 : matrices.front().rows(); }
    Eigen::Index cols() const { return matrices.empty() ? 0 : matrices.front().cols(); }
    double rate() const { return static_cast<double>(rows()) / static_cast<double>(cols()); }
};

SignalEnsemble generate_signal(Eigen::Index N, Eigen::Index J, double rho, PriorKind prior_kind,
                               std::uint64_t seed);

/// GaussianUnitRow draws N(0, 1/N) entries and, unless `normalize_rows` is
/// false, rescales each row to unit norm. SignedBernoulli draws +-1/sqrt(N).
Eigen::MatrixXd generate_matrix(Eigen::Index M, Eigen::Index N, MatrixKind kind, std::uint64_t seed,
                                bool normalize_rows = true);

/// y = Z(A x): additive N(0, delta_z) noise, or {0,1} draws with
/// P(y=1) = 1/(1+exp(-a w)).
Eigen::VectorXd measure(const Eigen::MatrixXd& A, const Eigen::Ref<const Eigen::VectorXd>& x,
                        const ChannelModel& channel, std::uint64_t seed);

struct InstanceParams {
    Eigen::Index N = 0;
    Eigen::Index M = 0;
    Eigen::Index J = 1;
    double rho = 0.1;
    PriorKind prior_kind = PriorKind::BernoulliGaussian;
    MatrixKind matrix_kind = MatrixKind::GaussianUnitRow;
    bool normalize_rows = true;
    ChannelModel channel = AwgnChannel{0.01};
};

struct ProblemInstance {
    InstanceParams params;
    std::uint64_t seed = 0;
    SignalEnsemble signal;
    MeasurementSet measurements;
};

/// Draws signal, J matrices and J observation vectors on independent streams
/// derived from `seed` (signal; matrix j; noise j).
ProblemInstance make_instance(const InstanceParams& params, std::uint64_t seed);

} // namespace mmv
