#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace oddac {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Decision variables of the gain synthesis: Q (symmetric n x n), L (m x n)
/// and the S-procedure multipliers a1, a2.
struct Decision {
  MatrixXd Q;
  MatrixXd Lmat;
  double a1 = 0.0;
  double a2 = 0.0;
};

/// Packing of a Decision into a flat vector: the upper triangle of Q row by
/// row (one entry per symmetric pair), L column-major, then a1, a2.
struct DecisionLayout {
  int n = 0;
  int m = 0;

  int q_count() const { return n * (n + 1) / 2; }
  int l_count() const { return m * n; }
  int alpha1_index() const { return q_count() + l_count(); }
  int alpha2_index() const { return alpha1_index() + 1; }
  int size() const { return alpha2_index() + 1; }

  VectorXd encode(const Decision& d) const;
  Decision decode(const VectorXd& y) const;
};

/// F(y) = constant + sum_i y_i * coeffs[i]; an empty coefficient means the
/// variable does not enter this constraint. Required: F(y) >= 0.
struct AffineConstraint {
  std::string name;
  MatrixXd constant;
  std::vector<MatrixXd> coeffs;

  int dim() const { return static_cast<int>(constant.rows()); }
  MatrixXd evaluate(const VectorXd& y) const;
};

using AffineMap = std::function<MatrixXd(const Decision&)>;

/// Upper bound imposed on the S-procedure multipliers.
inline constexpr double kMultiplierBound = 1e8;

/// A set of affine PSD constraints over the decision variables.
class FeasibilityProgram {
 public:
  FeasibilityProgram(int n, int m);

  /// Samples `f` at zero and at every unit decision vector to recover its
  /// affine data. Throws ProgramError if the result is not symmetric, changes
  /// size, or fails an affinity probe at an off-basis point.
  void add_constraint(std::string name, const AffineMap& f);

  /// 0 <= a_k <= kMultiplierBound for both multipliers.
  void add_multiplier_bounds();

  void set_initial_point(const Decision& d);

  const DecisionLayout& layout() const { return layout_; }
  int n() const { return layout_.n; }
  int m() const { return layout_.m; }
  const std::vector<AffineConstraint>& constraints() const { return constraints_; }
  const VectorXd& initial_point() const { return initial_; }

  /// Throws ProgramError on an empty program or inconsistent data.
  void validate() const;

 private:
  DecisionLayout layout_;
  std::vector<AffineConstraint> constraints_;
  VectorXd initial_;
};

/// Outcome of maximizing the uniform margin s subject to F_j(y) >= s I.
struct MarginResult {
  enum class Termination {
    kConverged,
    kInfeasibleCertified,
    kIterationLimit,
    kNumericalFailure,
  };

  VectorXd y;
  double margin = -std::numeric_limits<double>::infinity();
  double upper_bound = std::numeric_limits<double>::infinity();
  int iterations = 0;
  Termination termination = Termination::kNumericalFailure;
};

/// Narrow solver interface: affine PSD constraints in, point and bounds out.
/// Implementations must be safe to call concurrently on distinct programs.
class SdpBackend {
 public:
  virtual ~SdpBackend() = default;
  virtual std::string id() const = 0;
  virtual MarginResult maximize_margin(const FeasibilityProgram& prog) const = 0;
};

/// Log-det barrier path following on (y, s) with damped Newton centering.
class BarrierBackend final : public SdpBackend {
 public:
  struct Options {
    double initial_weight = 1.0;
    double weight_growth = 10.0;
    double gap_tolerance = 1e-9;
    double relative_gap = 1e-6;  // used once a non-negative margin is reached
    double newton_tolerance = 1e-10;
    int max_newton_steps = 3000;
  };

  BarrierBackend() = default;
  explicit BarrierBackend(Options opts) : opts_(opts) {}

  std::string id() const override { return "barrier-newton/1"; }
  MarginResult maximize_margin(const FeasibilityProgram& prog) const override;

 private:
  Options opts_;
};

/// Backend by id ("barrier"). Throws ParameterError for unknown ids.
std::shared_ptr<const SdpBackend> make_backend(const std::string& id);

/// Backend named by ODDAC_SDP_BACKEND, defaulting to "barrier".
std::shared_ptr<const SdpBackend> backend_from_env();

inline constexpr const char* kBackendEnvVar = "ODDAC_SDP_BACKEND";

enum class SolveStatus { kFeasible, kInfeasible, kSolverFailure };

const char* to_string(SolveStatus s);

struct ConstraintResidual {
  std::string name;
  double min_eigenvalue = 0.0;
};

/// Solver output for one gain update. K = L Q^{-1}, P = Q^{-1}.
struct GainCertificate {
  MatrixXd Q;
  MatrixXd Lmat;
  double a1 = 0.0;
  double a2 = 0.0;
  MatrixXd K;
  MatrixXd P;
  std::vector<ConstraintResidual> residuals;
  SolveStatus status = SolveStatus::kSolverFailure;
  double margin = 0.0;
  double margin_upper_bound = 0.0;
  bool multiplier_at_bound = false;
  int iterations = 0;
  std::string backend;
  std::string note;
};

/// Feasible iff the backend reached margin >= -1e-9 and every residual is
/// >= -1e-6; Infeasible when the margin is certified (or converged) below
/// -1e-9; SolverFailure otherwise.
GainCertificate solve(const FeasibilityProgram& prog, const SdpBackend& backend);

struct VerificationReport {
  std::vector<ConstraintResidual> residuals;  // every program constraint + Q_spd
  double gain_consistency = 0.0;     // ||K Q - L||_max
  double inverse_consistency = 0.0;  // ||P Q - I||_max
  double tol = 0.0;
  bool passed = false;
};

/// Recomputes every residual from the raw matrices with a dense symmetric
/// eigensolver; never touches the backend.
VerificationReport verify(const GainCertificate& cert,
                          const FeasibilityProgram& prog, double tol);

}  // namespace oddac
