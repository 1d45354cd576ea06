#pragma once

#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace oddac {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// A pair (A, B) pinned at an integer time.
struct Keyframe {
  int time = 0;
  MatrixXd A;
  MatrixXd B;
};

struct KeyframeSource {
  std::vector<Keyframe> keyframes;
};

struct ConstantSource {
  MatrixXd A;
  MatrixXd B;
};

struct ExplicitSource {};

using TrajectorySource =
    std::variant<KeyframeSource, ConstantSource, ExplicitSource>;

/// Time-indexed system matrices (A(t), B(t)) for t = 0..horizon of
///   x(t+1) = A(t) x(t) + B(t) u(t).
/// Always holds exactly horizon + 1 pairs of consistent dimensions.
class MatrixTrajectory {
 public:
  MatrixTrajectory(std::vector<MatrixXd> a_seq, std::vector<MatrixXd> b_seq,
                   TrajectorySource source);

  int horizon() const { return static_cast<int>(a_seq_.size()) - 1; }
  int n() const { return static_cast<int>(a_seq_.front().rows()); }
  int m() const { return static_cast<int>(b_seq_.front().cols()); }

  /// Throws HorizonError outside [0, horizon].
  const MatrixXd& A(int t) const;
  const MatrixXd& B(int t) const;

  const std::vector<MatrixXd>& a_seq() const { return a_seq_; }
  const std::vector<MatrixXd>& b_seq() const { return b_seq_; }
  const TrajectorySource& source() const { return source_; }

 private:
  std::vector<MatrixXd> a_seq_;
  std::vector<MatrixXd> b_seq_;
  TrajectorySource source_;
};

struct PlantState {
  VectorXd x;
  int t = 0;
};

/// Element-wise shape-preserving piecewise cubic Hermite (PCHIP) interpolation
/// of the keyframes, sampled at t = 0..horizon.
///
/// Interior slopes use the weighted harmonic mean of adjacent secants (zero at
/// local extrema); end slopes use the one-sided three-point formula with the
/// usual monotonicity limiter. Two keyframes interpolate linearly; a single
/// keyframe yields a constant trajectory. Otherwise keyframe times must be
/// strictly increasing, start at 0 and reach the horizon.
MatrixTrajectory make_keyframe_trajectory(std::vector<Keyframe> keyframes,
                                          int horizon);

MatrixTrajectory make_constant_trajectory(const MatrixXd& A, const MatrixXd& B,
                                          int horizon);

MatrixTrajectory make_explicit_trajectory(std::vector<MatrixXd> a_seq,
                                          std::vector<MatrixXd> b_seq);

/// One step of the plant: (A(t) x + B(t) u, t + 1).
PlantState step(const MatrixTrajectory& traj, const PlantState& s,
                const VectorXd& u);

/// max_t ||[A(t+1) - A(t), B(t+1) - B(t)]||_2. Zero for horizon 0.
double estimate_lipschitz(const MatrixTrajectory& traj);

/// Largest singular value.
double induced_two_norm(const MatrixXd& m);

}  // namespace oddac
