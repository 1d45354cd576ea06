#include "oddac/lmi.h"

#include <cmath>
#include <string>

#include "oddac/errors.h"
#include "oddac/linalg.h"

namespace oddac {

namespace {

MatrixXd identity(int n) { return MatrixXd::Identity(n, n); }

void check_gain_dims(const MatrixXd& Q, const MatrixXd& Lmat, int n, int m) {
  if (Q.rows() != n || Q.cols() != n || Lmat.rows() != m || Lmat.cols() != n) {
    throw DimensionError("Q must be " + std::to_string(n) + "x" +
                         std::to_string(n) + " and L " + std::to_string(m) +
                         "x" + std::to_string(n));
  }
}

// Left factor [I, X+; 0, -X; 0, -U; 0, 0; 0, 0 (; 0, 0)] of N1.
MatrixXd n1_factor(const DataMatrices& d, int rows) {
  const int n = d.n();
  const int m = d.m();
  const int cols = d.columns();
  MatrixXd G = MatrixXd::Zero(rows, n + cols);
  G.block(0, 0, n, n) = identity(n);
  G.block(0, n, n, cols) = d.X_plus;
  G.block(n, n, n, cols) = -d.X;
  G.block(2 * n, n, m, cols) = -d.U;
  return G;
}

MatrixXd n1_from_factor(const MatrixXd& G, const DataMatrices& d) {
  const int n = d.n();
  const int cols = d.columns();
  Eigen::VectorXd mid(n + cols);
  mid.head(n).setConstant(d.pi);
  mid.tail(cols).setConstant(-1.0);
  MatrixXd out = G * mid.asDiagonal() * G.transpose();
  return 0.5 * (out + out.transpose());
}

// N2 is diagonal: (L T)^2 I on block 0, -I on the dA and dB blocks.
MatrixXd n2_matrix(const BlockLayout& layout, int dim, double lt_sq) {
  const int n = layout.n;
  const int m = layout.m;
  MatrixXd N2 = MatrixXd::Zero(dim, dim);
  N2.block(0, 0, n, n) = lt_sq * identity(n);
  N2.block(layout.offset(3), layout.offset(3), n, n) = -identity(n);
  N2.block(layout.offset(4), layout.offset(4), m, m) = -identity(m);
  return N2;
}

void check_lambda(double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) {
    throw ParameterError("lambda must lie in (0, 1)");
  }
}

}  // namespace

int BlockLayout::offset(int block) const {
  const auto s = sizes();
  int off = 0;
  for (int b = 0; b < block; ++b) off += s[b];
  return off;
}

ThetaMatrix make_theta(const MatrixXd& A, const MatrixXd& B, const MatrixXd& dA,
                       const MatrixXd& dB) {
  const auto n = A.rows();
  const auto m = B.cols();
  if (A.cols() != n || B.rows() != n || dA.rows() != n || dA.cols() != n ||
      dB.rows() != n || dB.cols() != m) {
    throw DimensionError("inconsistent Theta blocks");
  }
  MatrixXd theta(n, 3 * n + 2 * m);
  theta << MatrixXd::Identity(n, n), A, B, dA, dB;
  return {theta};
}

LmiProblem build_problem(const DataMatrices& d, double lambda, double lipschitz,
                         int period) {
  check_lambda(lambda);
  if (lipschitz < 0.0) throw ParameterError("Lipschitz constant must be >= 0");
  if (period < 1) throw ParameterError("update period must be positive");
  if (d.columns() == 0 || d.n() == 0) {
    throw DimensionError("window data has no columns");
  }
  if (d.X_plus.rows() != d.n() || d.X_plus.cols() != d.columns() ||
      d.U.cols() != d.columns()) {
    throw DimensionError("X, X+ and U must have matching column counts");
  }
  LmiProblem p;
  p.n = d.n();
  p.m = d.m();
  p.lambda = lambda;
  p.pi = d.pi;
  p.LT_sq = (lipschitz * period) * (lipschitz * period);
  p.data = d;
  const BlockLayout layout = p.layout();
  p.bar_N1 = n1_from_factor(n1_factor(d, layout.lifted_dim()), d);
  p.bar_N2 = n2_matrix(layout, layout.lifted_dim(), p.LT_sq);
  return p;
}

MatrixXd bar_M_linear(const LmiProblem& p, const MatrixXd& Q,
                      const MatrixXd& Lmat) {
  check_gain_dims(Q, Lmat, p.n, p.m);
  const BlockLayout layout = p.layout();
  const int n = p.n;
  const int m = p.m;
  const int last = layout.offset(5);
  MatrixXd M = MatrixXd::Zero(layout.lifted_dim(), layout.lifted_dim());
  M.block(0, 0, n, n) = p.lambda * Q;
  M.block(layout.offset(1), last, n, n) = Q;
  M.block(layout.offset(2), last, m, n) = Lmat;
  M.block(layout.offset(3), last, n, n) = Q;
  M.block(layout.offset(4), last, m, n) = Lmat;
  M.block(last, layout.offset(1), n, n) = Q.transpose();
  M.block(last, layout.offset(2), n, m) = Lmat.transpose();
  M.block(last, layout.offset(3), n, n) = Q.transpose();
  M.block(last, layout.offset(4), n, m) = Lmat.transpose();
  M.block(last, last, n, n) = Q;
  return M;
}

MatrixXd eval_bar_M(const LmiProblem& p, const MatrixXd& Q, const MatrixXd& Lmat) {
  check_gain_dims(Q, Lmat, p.n, p.m);
  require_spd(Q, "Q");
  return bar_M_linear(p, Q, Lmat);
}

MatrixXd lmi_matrix(const LmiProblem& p, const MatrixXd& Q, const MatrixXd& Lmat,
                    double a1, double a2) {
  return bar_M_linear(p, Q, Lmat) - a1 * p.bar_N1 - a2 * p.bar_N2;
}

double residual(const LmiProblem& p, const MatrixXd& Q, const MatrixXd& Lmat,
                double a1, double a2) {
  if (a1 < 0.0 || a2 < 0.0) {
    throw ParameterError("S-procedure multipliers must be non-negative");
  }
  return min_eigenvalue(lmi_matrix(p, Q, Lmat, a1, a2));
}

MatrixXd expand_schur(const MatrixXd& Q, const MatrixXd& Lmat, double lambda) {
  const int n = static_cast<int>(Q.rows());
  const int m = static_cast<int>(Lmat.rows());
  check_gain_dims(Q, Lmat, n, m);
  require_spd(Q, "Q");
  const BlockLayout layout{n, m};
  MatrixXd S = MatrixXd::Zero(layout.reduced_dim(), n);
  S.block(layout.offset(1), 0, n, n) = Q;
  S.block(layout.offset(2), 0, m, n) = Lmat;
  S.block(layout.offset(3), 0, n, n) = Q;
  S.block(layout.offset(4), 0, m, n) = Lmat;
  const Eigen::LDLT<MatrixXd> q_fact(Q);
  MatrixXd M = -S * q_fact.solve(S.transpose());
  M.block(0, 0, n, n) += lambda * Q;
  return 0.5 * (M + M.transpose());
}

std::pair<MatrixXd, MatrixXd> build_N1_N2(const DataMatrices& d, double lipschitz,
                                          int period) {
  const BlockLayout layout{d.n(), d.m()};
  const double lt = lipschitz * period;
  return {n1_from_factor(n1_factor(d, layout.reduced_dim()), d),
          n2_matrix(layout, layout.reduced_dim(), lt * lt)};
}

MatrixXd SandwichConstraint::lower_matrix(const MatrixXd& Q) const {
  return Q - lower * identity(n);
}

MatrixXd SandwichConstraint::upper_matrix(const MatrixXd& Q) const {
  return upper * identity(n) - Q;
}

double SandwichConstraint::residual(const MatrixXd& Q) const {
  return std::min(min_eigenvalue(lower_matrix(Q)), min_eigenvalue(upper_matrix(Q)));
}

SandwichConstraint build_aux_sandwich(double sigma1, double sigma2, int n) {
  if (!(sigma1 > 0.0) || sigma1 > sigma2) {
    throw ParameterError("sandwich bounds need 0 < sigma1 <= sigma2");
  }
  return {n, 1.0 / sigma2, 1.0 / sigma1};
}

MatrixXd DwellConstraint::matrix(const MatrixXd& Q_next) const {
  const auto n = Q_prev.rows();
  MatrixXd out(2 * n, 2 * n);
  out << coef_prev * Q_prev, Q_prev, Q_prev, coef_next * Q_next;
  return out;
}

double DwellConstraint::residual(const MatrixXd& Q_next) const {
  return min_eigenvalue(matrix(Q_next));
}

MatrixXd DwellConstraint::normalized_matrix(const MatrixXd& Q_next) const {
  const auto n = Q_prev.rows();
  MatrixXd out(2 * n, 2 * n);
  out << Q_prev, scaled_coupling * Q_prev, scaled_coupling * Q_prev, Q_next;
  return out;
}

DwellConstraint build_aux_dwell(const MatrixXd& Q_prev, double lambda,
                                double lambda_hat, int period) {
  check_lambda(lambda);
  if (lambda_hat < lambda || lambda_hat >= 1.0) {
    throw ParameterError("lambda_hat must lie in [lambda, 1)");
  }
  if (period < 1) throw ParameterError("update period must be positive");
  require_spd(Q_prev, "Q_prev");
  DwellConstraint c;
  c.Q_prev = Q_prev;
  c.coef_prev = log_space_pow(lambda_hat, period);
  c.coef_next = log_space_pow(lambda, -period);
  c.scaled_coupling = log_space_pow(lambda / lambda_hat, 0.5 * period);
  return c;
}

}  // namespace oddac
