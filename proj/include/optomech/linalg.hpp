#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace optomech {

using Mat2 = Eigen::Matrix2d;
using Mat4 = Eigen::Matrix4d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Vec6 = Eigen::Matrix<double, 6, 1>;

/// All eigenvalues of a small real square matrix (n <= 16). Backed by a
/// Hessenberg reduction followed by the shifted (Francis) QR iteration.
/// Throws Error{NoConvergence} if the iteration fails.
std::vector<std::complex<double>> eigenvalues_real(const Eigen::MatrixXd& m);

double max_real_part(const Eigen::MatrixXd& m);

/// Solves m x = b by LU with partial pivoting. Throws Error{Singular} when a
/// pivot falls below 1e-14 * ||m||_max.
Eigen::VectorXd solve_linear(const Eigen::MatrixXd& m, const Eigen::VectorXd& b);

/// Largest absolute entry.
double max_norm(const Eigen::MatrixXd& m);

}  // namespace optomech
