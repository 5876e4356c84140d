#pragma once

#include <vector>

#include <Eigen/Dense>

namespace mmv {

struct OmpConfig {
    Eigen::Index max_atoms = 1;
    double residual_tol = 0.0;  // stop once |residual| <= residual_tol
    double threshold = 0.5;     // binarization cut used after recovery
};

struct OmpResult {
    Eigen::VectorXd x_hat;
    std::vector<Eigen::Index> support;      // in selection order
    std::vector<double> residual_norms;     // after each selection
    bool rank_deficient = false;            // a selected atom was (numerically) in the span of earlier ones
};

/// Orthogonal matching pursuit. The least-squares refit on the selected
/// atoms is maintained through an incremental Gram-Schmidt basis, so each
/// step costs one correlation pass plus O(M k).
OmpResult omp(const Eigen::MatrixXd& A, const Eigen::VectorXd& y, const OmpConfig& config);

/// 1 where x > threshold (strictly), else 0.
Eigen::VectorXd binarize(const Eigen::VectorXd& x, double threshold);

} // namespace mmv
