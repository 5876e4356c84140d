#include "mmv/omp.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "mmv/errors.hpp"

namespace mmv {

OmpResult omp(const Eigen::MatrixXd& A, const Eigen::VectorXd& y, const OmpConfig& config) {
    const Eigen::Index M = A.rows();
    const Eigen::Index N = A.cols();
    if (y.size() != M) {
        throw ParameterError("omp: observation length " + std::to_string(y.size()) + " != matrix rows " +
                             std::to_string(M));
    }
    if (config.max_atoms < 0 || config.max_atoms > M) {
        throw ParameterError("omp: max_atoms must lie in [0, M]");
    }
    if (!(config.residual_tol >= 0.0)) {
        throw ParameterError("omp: residual_tol must be nonnegative");
    }

    OmpResult out;
    out.x_hat = Eigen::VectorXd::Zero(N);
    const Eigen::Index budget = config.max_atoms;
    Eigen::MatrixXd Q(M, budget);    // orthonormal basis of the selected atoms
    Eigen::MatrixXd Rf = Eigen::MatrixXd::Zero(budget, budget);
    Eigen::VectorXd coeff_q(budget);  // Q^T y
    std::vector<bool> used(static_cast<std::size_t>(N), false);
    Eigen::VectorXd residual = y;
    const Eigen::VectorXd col_norm = A.colwise().norm().transpose();

    Eigen::Index k = 0;
    while (k < budget && residual.norm() > config.residual_tol) {
        const Eigen::VectorXd corr = A.transpose() * residual;
        Eigen::Index best = -1;
        double best_val = 0.0;
        for (Eigen::Index n = 0; n < N; ++n) {
            if (used[static_cast<std::size_t>(n)] || col_norm[n] == 0.0) {
                continue;
            }
            const double v = std::abs(corr[n]);
            if (v > best_val) {
                best_val = v;
                best = n;
            }
        }
        if (best < 0) {
            break;  // residual orthogonal to every remaining atom
        }
        used[static_cast<std::size_t>(best)] = true;
        out.support.push_back(best);

        // Two passes of modified Gram-Schmidt for numerical orthogonality.
        Eigen::VectorXd v = A.col(best);
        Eigen::VectorXd proj = Eigen::VectorXd::Zero(k);
        for (int pass = 0; pass < 2; ++pass) {
            for (Eigen::Index i = 0; i < k; ++i) {
                const double c = Q.col(i).dot(v);
                proj[i] += c;
                v -= c * Q.col(i);
            }
        }
        const double vn = v.norm();
        Rf.col(k).head(k) = proj;
        if (vn <= 1e-10 * col_norm[best]) {
            // Atom already in the span: keep it with zero weight.
            out.rank_deficient = true;
            Rf(k, k) = 0.0;
            Q.col(k).setZero();
            coeff_q[k] = 0.0;
        } else {
            Q.col(k) = v / vn;
            Rf(k, k) = vn;
            coeff_q[k] = Q.col(k).dot(y);
            residual -= coeff_q[k] * Q.col(k);
        }
        ++k;
        out.residual_norms.push_back(residual.norm());
    }

    if (k > 0) {
        // Back-substitution on R x = Q^T y; rank-deficient atoms get zero.
        Eigen::VectorXd coef = Eigen::VectorXd::Zero(k);
        for (Eigen::Index i = k - 1; i >= 0; --i) {
            if (Rf(i, i) == 0.0) {
                continue;
            }
            double acc = coeff_q[i];
            for (Eigen::Index c = i + 1; c < k; ++c) {
                acc -= Rf(i, c) * coef[c];
            }
            coef[i] = acc / Rf(i, i);
        }
        for (Eigen::Index i = 0; i < k; ++i) {
            out.x_hat[out.support[static_cast<std::size_t>(i)]] = coef[i];
        }
    }
    return out;
}

Eigen::VectorXd binarize(const Eigen::VectorXd& x, double threshold) {
    return (x.array() > threshold).cast<double>().matrix();
}

} // namespace mmv
