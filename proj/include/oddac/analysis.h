#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "oddac/controller.h"
#include "oddac/harness.h"
#include "oddac/plant.h"

namespace oddac {

using Eigen::MatrixXd;

/// Gain and Lyapunov matrix in force during each period [iT, (i+1)T).
struct GainSchedule {
  int T = 1;
  std::vector<MatrixXd> K;
  std::vector<MatrixXd> P;
  std::vector<bool> certified;

  int periods() const { return static_cast<int>(K.size()); }
  int period_of(int t) const { return t / T; }

  /// Period 0 runs K0 with P0 = Q0^{-1}; period i >= 1 uses update i - 1.
  static GainSchedule from_updates(const ControllerConfig& cfg,
                                   const std::vector<UpdateRecord>& updates);

  /// K0 and P0 for every period touching [0, horizon]; only period 0 counts
  /// as certified.
  static GainSchedule constant(const ControllerConfig& cfg, int horizon);
};

struct Violation {
  int t = 0;
  std::string check;
  double margin = 0.0;  // negative when violated
};

struct CheckSummary {
  std::string name;
  int evaluated = 0;
  int violated = 0;
  double worst_margin = 0.0;
};

struct StabilityReport {
  std::vector<double> q_trace;
  std::vector<double> pges_bound_trace;
  std::vector<Violation> violations;
  std::vector<CheckSummary> checks;
  std::vector<int> uncertified_periods;
  double B_bar = 0.0;
  double mu = 1.0;
  bool dwell_ok = false;
  double initial_gain_margin = 0.0;

  bool passed() const { return violations.empty(); }
};

/// lambda_min(lambda P0 - (A0 + B0 K0)' P0 (A0 + B0 K0)).
double check_initial_gain(const MatrixXd& A0, const MatrixXd& B0, const MatrixXd& K0,
                          const MatrixXd& P0, double lambda);

/// max_t ||B(t)||_2 over the trajectory.
double b_bar(const MatrixTrajectory& traj);

/// Absolute-plus-relative slack used by every trace check.
inline double trace_tolerance(double norm_x) { return 1e-7 * (1.0 + norm_x); }

/// |P_i^{1/2} x(t+1)| <= sqrt(lambda) |P_i^{1/2} x(t)| + sqrt(sigma2) B_bar v_bar + tol
/// for every logged step.
std::vector<Violation> lyapunov_step_check(const RunLog& log, const GainSchedule& sched,
                                           const ControllerConfig& cfg, double B_bar);

/// q(t) = (lambda_hat / lambda)^{(t - iT)/2} |P_i^{1/2} x(t)|, i = floor(t / T).
std::vector<double> q_trace(const RunLog& log, const GainSchedule& sched,
                            const ControllerConfig& cfg);

/// sqrt(sigma1)|x| <= q <= (lambda_hat/lambda)^{(T-1)/2} sqrt(sigma2) |x| + tol.
std::vector<Violation> check_q_sandwich(const RunLog& log, const std::vector<double>& q,
                                        const ControllerConfig& cfg);

/// q(t+1) <= sqrt(lambda_hat) q(t) + (lambda_hat/lambda)^{T/2} sqrt(sigma2) B_bar v_bar + tol.
std::vector<Violation> check_q_consecutive(const RunLog& log, const std::vector<double>& q,
                                           const ControllerConfig& cfg, double B_bar);

/// (sigma2/sqrt(sigma1)) lambda_hat^{t/2} |x0|
///   + sqrt(sigma2/sigma1) (1 - sqrt(lambda_hat))^{-1} (lambda_hat/lambda)^{T/2} B_bar v_bar.
/// Throws ParameterError for lambda_hat >= 1.
double pges_bound(const ControllerConfig& cfg, double B_bar, double x0_norm, double t);

/// The bound obtained by iterating the consecutive claim t times from
/// q(0) <= sqrt(sigma2)|x0| and dividing by sqrt(sigma1).
double unrolled_bound(const ControllerConfig& cfg, double B_bar, double x0_norm, int t);

/// True iff T > -ln(mu) / ln(lambda). Requires mu >= 1 and lambda in (0, 1).
bool check_dwell(double mu, double lambda, int T);

/// max_i lambda_max(P_i^{-1/2} P_{i+1} P_i^{-1/2}); 1 for a single period.
double switch_ratio(const GainSchedule& sched);

/// Per period i >= 1: the true (A(iT), B(iT)) lies in the data-consistency
/// set, every drift A(t) - A(iT), B(t) - B(iT) for t in the period lies in the
/// drift ball, and (A(t)+B(t)K)' P (A(t)+B(t)K) <= lambda P + 1e-7 I with the
/// active (K, P). Periods without an accepted certificate add "no_certificate".
std::vector<Violation> set_membership_audit(const std::vector<UpdateRecord>& updates,
                                            const GainSchedule& sched,
                                            const MatrixTrajectory& traj,
                                            const ControllerConfig& cfg, int horizon);

/// Runs every check above on a finished run. Static-gain runs (no updates,
/// run_mode "static") are checked against GainSchedule::constant.
StabilityReport analyze(const RunLog& log, const std::vector<UpdateRecord>& updates,
                        const MatrixTrajectory& traj, const ControllerConfig& cfg);

/// Plain-text report: header, one line per check, then the first violations.
std::string format_report(const StabilityReport& r, int max_violations = 20);

}  // namespace oddac
