#include "oddac/window.h"

#include <cmath>

#include <string>

#include "oddac/errors.h"
#include "oddac/linalg.h"
#include "oddac/plant.h"

namespace oddac {

namespace {
constexpr double kPsdTolerance = 1e-9;
}  // namespace

DataMatrices DataMatrices::scaled(double c) const {
  return {c * X, c * X_plus, c * U, (pi * c) * c};  // no c^2 overflow for pi = 0
}

double data_normalization(const DataMatrices& d) {
  MatrixXd stacked(d.n() + d.m(), d.columns());
  stacked << d.X, d.U;
  const double norm = induced_two_norm(stacked);
  const double c = 1.0 / norm;
  return norm > 0.0 && std::isfinite(c) ? c : 1.0;
}

DataWindow::DataWindow(int capacity, int start_time)
    : capacity_(capacity), start_time_(start_time) {
  if (capacity < 1) throw ParameterError("window capacity must be positive");
  samples_.reserve(capacity);
}

void DataWindow::push_sample(const VectorXd& x, const VectorXd& u,
                             const VectorXd& x_next) {
  if (full()) {
    throw CapacityError("data window already holds " +
                        std::to_string(capacity_) + " samples");
  }
  if (x.size() != x_next.size()) {
    throw DimensionError("x and x_next lengths differ");
  }
  if (!samples_.empty() && (x.size() != samples_.front().x.size() ||
                            u.size() != samples_.front().u.size())) {
    throw DimensionError("sample dimensions differ from earlier samples");
  }
  samples_.push_back({x, u, x_next});
}

void DataWindow::reset(int start_time) {
  samples_.clear();
  start_time_ = start_time;
}

DataMatrices build_data_matrices(const DataWindow& w, double lipschitz) {
  if (!w.full()) {
    throw IncompleteWindowError("window holds " + std::to_string(w.size()) +
                                " of " + std::to_string(w.capacity()) +
                                " samples");
  }
  if (lipschitz < 0.0) throw ParameterError("Lipschitz constant must be >= 0");
  const auto& s = w.samples();
  const int cols = w.capacity();
  const int n = static_cast<int>(s.front().x.size());
  const int m = static_cast<int>(s.front().u.size());
  DataMatrices d{MatrixXd(n, cols), MatrixXd(n, cols), MatrixXd(m, cols), 0.0};
  double weighted = 0.0;
  for (int j = 0; j < cols; ++j) {
    d.X.col(j) = s[j].x;
    d.X_plus.col(j) = s[j].x_next;
    d.U.col(j) = s[j].u;
    const double k = cols - j;  // column j is the k-th most recent sample
    weighted += k * k * (s[j].x.squaredNorm() + s[j].u.squaredNorm());
  }
  d.pi = lipschitz * lipschitz * weighted;
  return d;
}

bool sigma_i_contains(const DataMatrices& d, const MatrixXd& A,
                      const MatrixXd& B) {
  if (A.rows() != d.n() || A.cols() != d.n() || B.rows() != d.n() ||
      B.cols() != d.m()) {
    throw DimensionError("(A, B) dimensions do not match the window data");
  }
  // The set is invariant under (X, X+, U, pi) -> (cX, cX+, cU, c^2 pi); the
  // tolerance is applied at unit data scale.
  const DataMatrices unit = d.scaled(data_normalization(d));
  const MatrixXd W = unit.X_plus - A * unit.X - B * unit.U;
  const MatrixXd gap =
      unit.pi * MatrixXd::Identity(d.n(), d.n()) - W * W.transpose();
  return min_eigenvalue(gap) >= -kPsdTolerance;
}

bool sigma_d_contains(const MatrixXd& dA, const MatrixXd& dB, double lipschitz,
                      int period) {
  return induced_two_norm(hcat(dA, dB)) <= lipschitz * period + 1e-12;
}

}  // namespace oddac
