#include "oddac/linalg.h"

#include <cmath>
#include <string>

#include "oddac/errors.h"

namespace oddac {

namespace {

Eigen::VectorXd sym_eigenvalues(const MatrixXd& m) {
  if (m.rows() != m.cols()) {
    throw DimensionError("eigenvalues requested for a non-square matrix");
  }
  if (m.size() == 0) return {};
  const MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw MatrixError("symmetric eigenvalue decomposition failed");
  }
  return es.eigenvalues();
}

}  // namespace

double min_eigenvalue(const MatrixXd& m) {
  const auto ev = sym_eigenvalues(m);
  return ev.size() == 0 ? 0.0 : ev.minCoeff();
}

double max_eigenvalue(const MatrixXd& m) {
  const auto ev = sym_eigenvalues(m);
  return ev.size() == 0 ? 0.0 : ev.maxCoeff();
}

bool is_symmetric(const MatrixXd& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol;
}

MatrixXd sym_sqrt(const MatrixXd& m) {
  if (m.rows() != m.cols()) {
    throw DimensionError("matrix square root of a non-square matrix");
  }
  const MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(sym);
  if (es.info() != Eigen::Success) {
    throw MatrixError("symmetric eigenvalue decomposition failed");
  }
  Eigen::VectorXd ev = es.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < -1e-12) {
      throw MatrixError("matrix square root of an indefinite matrix");
    }
    ev(i) = std::sqrt(std::max(ev(i), 0.0));
  }
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

void require_spd(const MatrixXd& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw MatrixError(std::string(what) + " must be a non-empty square matrix");
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (!is_symmetric(m, 1e-9 * scale)) {
    throw MatrixError(std::string(what) + " must be symmetric");
  }
  Eigen::LLT<MatrixXd> llt(0.5 * (m + m.transpose()));
  if (llt.info() != Eigen::Success || min_eigenvalue(m) <= 0.0) {
    throw MatrixError(std::string(what) + " must be positive definite");
  }
}

MatrixXd hcat(const MatrixXd& a, const MatrixXd& b) {
  if (a.rows() != b.rows()) {
    throw DimensionError("horizontal concatenation with mismatched row counts");
  }
  MatrixXd out(a.rows(), a.cols() + b.cols());
  out << a, b;
  return out;
}

double log_space_pow(double base, double power) {
  if (power == 0.0) return 1.0;
  return std::exp(power * std::log(base));
}

}  // namespace oddac
