#pragma once

#include <Eigen/Dense>

namespace oddac {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Smallest eigenvalue of the symmetric part of `m`.
double min_eigenvalue(const MatrixXd& m);

/// Largest eigenvalue of the symmetric part of `m`.
double max_eigenvalue(const MatrixXd& m);

bool is_symmetric(const MatrixXd& m, double tol);

/// Symmetric positive semidefinite square root through an eigendecomposition.
/// Eigenvalues in [-1e-12, 0] are clamped to zero; anything more negative
/// throws MatrixError.
MatrixXd sym_sqrt(const MatrixXd& m);

/// Throws MatrixError unless `m` is square, symmetric (relative 1e-9) and
/// positive definite.
void require_spd(const MatrixXd& m, const char* what);

/// Horizontal concatenation [a, b]. Row counts must agree.
MatrixXd hcat(const MatrixXd& a, const MatrixXd& b);

/// Exponentiation base^power evaluated as exp(power * log(base)).
double log_space_pow(double base, double power);

}  // namespace oddac
