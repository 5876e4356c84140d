#pragma once

#include <filesystem>

#include <Eigen/Dense>

#include "mmv/model.hpp"

namespace mmv {

/// Writes `dir/header.json` (N, M, J, rho, prior, matrix kind, channel,
/// seed) plus `X.csv`, `A_<j>.csv` and `y_<j>.csv` with 17 significant
/// digits, enough to replay a trial bit-for-bit.
void save_instance(const ProblemInstance& inst, const std::filesystem::path& dir);

ProblemInstance load_instance(const std::filesystem::path& dir);

void write_matrix_csv(const Eigen::MatrixXd& m, const std::filesystem::path& path);
Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path);

} // namespace mmv
