#include "oddac/plant.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "oddac/errors.h"
#include "oddac/linalg.h"

namespace oddac {

namespace {

int sign(double v) { return (v > 0.0) - (v < 0.0); }

// One-sided three-point end slope with the shape-preserving limiter.
double edge_slope(double h0, double h1, double m0, double m1) {
  double d = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
  if (sign(d) != sign(m0)) {
    d = 0.0;
  } else if (sign(m0) != sign(m1) && std::abs(d) > 3.0 * std::abs(m0)) {
    d = 3.0 * m0;
  }
  return d;
}

// PCHIP slopes for one scalar series over knots `x`.
std::vector<double> pchip_slopes(const std::vector<double>& x,
                                 const std::vector<double>& y) {
  const std::size_t k = x.size();
  std::vector<double> h(k - 1), secant(k - 1), d(k, 0.0);
  for (std::size_t i = 0; i + 1 < k; ++i) {
    h[i] = x[i + 1] - x[i];
    secant[i] = (y[i + 1] - y[i]) / h[i];
  }
  if (k == 2) {
    d[0] = d[1] = secant[0];
    return d;
  }
  for (std::size_t i = 1; i + 1 < k; ++i) {
    const double m0 = secant[i - 1];
    const double m1 = secant[i];
    if (sign(m0) != sign(m1) || m0 == 0.0 || m1 == 0.0) {
      d[i] = 0.0;
      continue;
    }
    const double w1 = 2.0 * h[i] + h[i - 1];
    const double w2 = h[i] + 2.0 * h[i - 1];
    d[i] = (w1 + w2) / (w1 / m0 + w2 / m1);
  }
  d[0] = edge_slope(h[0], h[1], secant[0], secant[1]);
  d[k - 1] = edge_slope(h[k - 2], h[k - 3], secant[k - 2], secant[k - 3]);
  return d;
}

double hermite(double y0, double y1, double d0, double d1, double h, double s) {
  const double s2 = s * s;
  const double s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * d0 +
         (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * h * d1;
}

// Interpolates the stacked matrices [A, B] entry by entry.
std::vector<MatrixXd> interpolate_stacked(const std::vector<Keyframe>& kfs,
                                          int horizon) {
  const int rows = static_cast<int>(kfs.front().A.rows());
  const int cols = static_cast<int>(kfs.front().A.cols() + kfs.front().B.cols());
  std::vector<MatrixXd> stacked;
  std::vector<double> knots;
  for (const auto& kf : kfs) {
    stacked.push_back(hcat(kf.A, kf.B));
    knots.push_back(kf.time);
  }
  std::vector<MatrixXd> out(horizon + 1, MatrixXd(rows, cols));
  std::vector<double> series(kfs.size());
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      for (std::size_t k = 0; k < kfs.size(); ++k) series[k] = stacked[k](r, c);
      const auto slopes = pchip_slopes(knots, series);
      std::size_t seg = 0;
      for (int t = 0; t <= horizon; ++t) {
        while (seg + 2 < knots.size() && t >= knots[seg + 1]) ++seg;
        const double h = knots[seg + 1] - knots[seg];
        const double s = (t - knots[seg]) / h;
        out[t](r, c) = (t == knots[seg])
                           ? series[seg]
                           : (t == knots[seg + 1])
                                 ? series[seg + 1]
                                 : hermite(series[seg], series[seg + 1],
                                           slopes[seg], slopes[seg + 1], h, s);
      }
    }
  }
  return out;
}

void check_pair_dims(const MatrixXd& A, const MatrixXd& B, int n, int m) {
  if (A.rows() != n || A.cols() != n || B.rows() != n || B.cols() != m) {
    throw DimensionError("inconsistent (A, B) dimensions: expected A " +
                         std::to_string(n) + "x" + std::to_string(n) + ", B " +
                         std::to_string(n) + "x" + std::to_string(m));
  }
}

}  // namespace

MatrixTrajectory::MatrixTrajectory(std::vector<MatrixXd> a_seq,
                                   std::vector<MatrixXd> b_seq,
                                   TrajectorySource source)
    : a_seq_(std::move(a_seq)), b_seq_(std::move(b_seq)),
      source_(std::move(source)) {
  if (a_seq_.empty() || a_seq_.size() != b_seq_.size()) {
    throw DimensionError("A and B sequences must be non-empty and equally long");
  }
  const int n = static_cast<int>(a_seq_.front().rows());
  const int m = static_cast<int>(b_seq_.front().cols());
  if (n == 0) throw DimensionError("state dimension must be positive");
  for (std::size_t t = 0; t < a_seq_.size(); ++t) {
    check_pair_dims(a_seq_[t], b_seq_[t], n, m);
  }
}

const MatrixXd& MatrixTrajectory::A(int t) const {
  if (t < 0 || t > horizon()) {
    throw HorizonError("time " + std::to_string(t) + " outside [0, " +
                       std::to_string(horizon()) + "]");
  }
  return a_seq_[t];
}

const MatrixXd& MatrixTrajectory::B(int t) const {
  if (t < 0 || t > horizon()) {
    throw HorizonError("time " + std::to_string(t) + " outside [0, " +
                       std::to_string(horizon()) + "]");
  }
  return b_seq_[t];
}

MatrixTrajectory make_keyframe_trajectory(std::vector<Keyframe> keyframes,
                                          int horizon) {
  if (keyframes.empty()) throw KeyframeError("no keyframes given");
  if (horizon < 0) throw HorizonError("negative horizon");
  const int n = static_cast<int>(keyframes.front().A.rows());
  const int m = static_cast<int>(keyframes.front().B.cols());
  if (n == 0) throw DimensionError("state dimension must be positive");
  for (const auto& kf : keyframes) check_pair_dims(kf.A, kf.B, n, m);

  if (keyframes.front().time != 0) {
    throw KeyframeError("first keyframe must be at t = 0");
  }
  for (std::size_t k = 1; k < keyframes.size(); ++k) {
    if (keyframes[k].time <= keyframes[k - 1].time) {
      throw KeyframeError("keyframe times must be strictly increasing");
    }
  }

  std::vector<MatrixXd> a_seq, b_seq;
  a_seq.reserve(horizon + 1);
  b_seq.reserve(horizon + 1);
  if (keyframes.size() == 1) {
    a_seq.assign(horizon + 1, keyframes.front().A);
    b_seq.assign(horizon + 1, keyframes.front().B);
  } else {
    if (keyframes.back().time < horizon) {
      throw KeyframeError("last keyframe precedes the horizon");
    }
    for (auto& stacked : interpolate_stacked(keyframes, horizon)) {
      a_seq.push_back(stacked.leftCols(n));
      b_seq.push_back(stacked.rightCols(m));
    }
  }
  return MatrixTrajectory(std::move(a_seq), std::move(b_seq),
                          KeyframeSource{std::move(keyframes)});
}

MatrixTrajectory make_constant_trajectory(const MatrixXd& A, const MatrixXd& B,
                                          int horizon) {
  if (horizon < 0) throw HorizonError("negative horizon");
  check_pair_dims(A, B, static_cast<int>(A.rows()), static_cast<int>(B.cols()));
  return MatrixTrajectory(std::vector<MatrixXd>(horizon + 1, A),
                          std::vector<MatrixXd>(horizon + 1, B),
                          ConstantSource{A, B});
}

MatrixTrajectory make_explicit_trajectory(std::vector<MatrixXd> a_seq,
                                          std::vector<MatrixXd> b_seq) {
  return MatrixTrajectory(std::move(a_seq), std::move(b_seq), ExplicitSource{});
}

PlantState step(const MatrixTrajectory& traj, const PlantState& s,
                const VectorXd& u) {
  if (s.t < 0 || s.t >= traj.horizon()) {
    throw HorizonError("cannot step from t = " + std::to_string(s.t) +
                       " with horizon " + std::to_string(traj.horizon()));
  }
  if (s.x.size() != traj.n() || u.size() != traj.m()) {
    throw DimensionError("state or input length does not match the plant");
  }
  return {traj.A(s.t) * s.x + traj.B(s.t) * u, s.t + 1};
}

double estimate_lipschitz(const MatrixTrajectory& traj) {
  double lip = 0.0;
  for (int t = 0; t < traj.horizon(); ++t) {
    const MatrixXd diff = hcat(traj.A(t + 1) - traj.A(t), traj.B(t + 1) - traj.B(t));
    lip = std::max(lip, induced_two_norm(diff));
  }
  return lip;
}

double induced_two_norm(const MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<MatrixXd> svd(m);
  return svd.singularValues()(0);
}

}  // namespace oddac
