#pragma once

#include <array>
#include <utility>

#include <Eigen/Dense>

#include "oddac/window.h"

namespace oddac {

using Eigen::MatrixXd;

/// Block partition of the S-procedure matrices. The lifted (bar) matrices use
/// the six blocks [n, n, m, n, m, n]; the reduced appendix forms drop the last.
struct BlockLayout {
  int n = 0;
  int m = 0;

  std::array<int, 6> sizes() const { return {n, n, m, n, m, n}; }
  int offset(int block) const;
  int lifted_dim() const { return 4 * n + 2 * m; }
  int reduced_dim() const { return 3 * n + 2 * m; }
};

/// Numeric data of the gain-synthesis LMI for one window:
///   bar_M(Q, L) - a1 * bar_N1 - a2 * bar_N2 >= 0.
struct LmiProblem {
  int n = 0;
  int m = 0;
  double lambda = 0.0;
  MatrixXd bar_N1;
  MatrixXd bar_N2;
  double pi = 0.0;
  double LT_sq = 0.0;  // (L T)^2
  DataMatrices data;

  BlockLayout layout() const { return {n, m}; }
};

/// Theta = [I, A, B, dA, dB], the row selector that maps the reduced S-procedure
/// matrices back onto a concrete (A + dA, B + dB).
struct ThetaMatrix {
  MatrixXd theta;
};

ThetaMatrix make_theta(const MatrixXd& A, const MatrixXd& B, const MatrixXd& dA,
                       const MatrixXd& dB);

/// Builds bar_N1 from (X, X+, U, pi) and bar_N2 from (L T)^2.
/// Throws ParameterError for lambda outside (0, 1), L < 0 or T < 1, and
/// DimensionError for an empty window.
LmiProblem build_problem(const DataMatrices& d, double lambda, double lipschitz,
                         int period);

/// bar_M(Q, L). Linear in (Q, L); throws MatrixError unless Q is SPD.
MatrixXd eval_bar_M(const LmiProblem& p, const MatrixXd& Q, const MatrixXd& Lmat);

/// bar_M without the SPD check, for building affine constraint data.
MatrixXd bar_M_linear(const LmiProblem& p, const MatrixXd& Q, const MatrixXd& Lmat);

/// bar_M - a1 bar_N1 - a2 bar_N2.
MatrixXd lmi_matrix(const LmiProblem& p, const MatrixXd& Q, const MatrixXd& Lmat,
                    double a1, double a2);

/// Smallest eigenvalue of lmi_matrix(); feasibility means >= -tol.
double residual(const LmiProblem& p, const MatrixXd& Q, const MatrixXd& Lmat,
                double a1, double a2);

/// Schur complement of the last block of bar_M:
///   M = blkdiag(lambda Q, 0, 0, 0, 0) - S Q^{-1} S',  S = [0; Q; L; Q; L].
MatrixXd expand_schur(const MatrixXd& Q, const MatrixXd& Lmat, double lambda);

/// Reduced N1 and N2 (the lifted matrices without the last block row/column).
std::pair<MatrixXd, MatrixXd> build_N1_N2(const DataMatrices& d, double lipschitz,
                                          int period);

/// sigma2^{-1} I <= Q <= sigma1^{-1} I.
struct SandwichConstraint {
  int n = 0;
  double lower = 0.0;  // 1 / sigma2
  double upper = 0.0;  // 1 / sigma1

  MatrixXd lower_matrix(const MatrixXd& Q) const;  // Q - lower I
  MatrixXd upper_matrix(const MatrixXd& Q) const;  // upper I - Q
  double residual(const MatrixXd& Q) const;
};

/// Throws ParameterError unless 0 < sigma1 <= sigma2.
SandwichConstraint build_aux_sandwich(double sigma1, double sigma2, int n);

/// Switch coupling on the next Q:
///   [[lambda_hat^T Q_prev, Q_prev], [Q_prev, lambda^{-T} Q_next]] >= 0,
/// equivalent to P_next <= (lambda_hat / lambda)^T P_prev.
struct DwellConstraint {
  MatrixXd Q_prev;
  double coef_prev = 0.0;  // lambda_hat^T
  double coef_next = 0.0;  // lambda^{-T}
  double scaled_coupling = 0.0;  // (lambda / lambda_hat)^{T/2}

  MatrixXd matrix(const MatrixXd& Q_next) const;
  double residual(const MatrixXd& Q_next) const;

  /// The same constraint after the congruence
  /// diag(lambda_hat^{-T/2} I, lambda^{T/2} I):
  ///   [[Q_prev, r Q_prev], [r Q_prev, Q_next]],  r = (lambda / lambda_hat)^{T/2}.
  /// Same inertia, far better scaled for large T.
  MatrixXd normalized_matrix(const MatrixXd& Q_next) const;
};

/// Throws ParameterError unless 0 < lambda <= lambda_hat < 1 and T >= 1;
/// MatrixError unless Q_prev is SPD.
DwellConstraint build_aux_dwell(const MatrixXd& Q_prev, double lambda,
                                double lambda_hat, int period);

}  // namespace oddac
