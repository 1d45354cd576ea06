#pragma once

#include <vector>

#include <Eigen/Dense>

namespace oddac {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// One transition (x(t), u(t), x(t+1)) collected inside a data window.
struct Sample {
  VectorXd x;
  VectorXd u;
  VectorXd x_next;
};

/// Window data in stacked form X+ = A X + B U + W, plus the scalar pi of the
/// disturbance-energy bound W W' <= pi I.
struct DataMatrices {
  MatrixXd X;
  MatrixXd X_plus;
  MatrixXd U;
  double pi = 0.0;

  int n() const { return static_cast<int>(X.rows()); }
  int m() const { return static_cast<int>(U.rows()); }
  int columns() const { return static_cast<int>(X.cols()); }

  /// Copy with every data column multiplied by `c` and pi by c^2. The
  /// consistency set is unchanged by this rescaling.
  DataMatrices scaled(double c) const;
};

/// 1 / ||[X; U]||_2, or 1 when that reciprocal is not finite (all-zero or
/// subnormal data).
double data_normalization(const DataMatrices& d);

/// Rolling buffer of the T_W samples that precede a gain switch.
class DataWindow {
 public:
  DataWindow(int capacity, int start_time);

  /// Appends in time order. Throws CapacityError when full.
  void push_sample(const VectorXd& x, const VectorXd& u, const VectorXd& x_next);
  void reset(int start_time);

  int capacity() const { return capacity_; }
  int start_time() const { return start_time_; }
  int size() const { return static_cast<int>(samples_.size()); }
  bool full() const { return size() == capacity_; }
  const std::vector<Sample>& samples() const { return samples_; }

 private:
  int capacity_;
  int start_time_;
  std::vector<Sample> samples_;
};

/// Assembles X, X+, U column-wise in time order and
///   pi = L^2 * sum_{k=1}^{T_W} k^2 |[x; u](t_S - k)|^2,
/// i.e. the k-th most recent sample is weighted by k^2.
/// Throws IncompleteWindowError unless the window is full.
DataMatrices build_data_matrices(const DataWindow& w, double lipschitz);

/// Membership of (A, B) in the data-consistency set: with W = X+ - A X - B U,
/// true iff pi I - W W' >= -1e-9 I, evaluated on data rescaled by
/// data_normalization().
bool sigma_i_contains(const DataMatrices& d, const MatrixXd& A, const MatrixXd& B);

/// Membership of (dA, dB) in the drift set ||[dA, dB]||_2 <= L T.
bool sigma_d_contains(const MatrixXd& dA, const MatrixXd& dB, double lipschitz,
                      int period);

}  // namespace oddac
