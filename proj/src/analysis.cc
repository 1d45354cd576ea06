#include "oddac/analysis.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "oddac/errors.h"
#include "oddac/linalg.h"
#include "oddac/window.h"

namespace oddac {

namespace {

void collect(std::vector<Violation>& all, std::vector<CheckSummary>& sums,
             const std::string& name, const std::vector<Violation>& found, int evaluated,
             double worst) {
  sums.push_back({name, evaluated, static_cast<int>(found.size()), worst});
  all.insert(all.end(), found.begin(), found.end());
}

// Sampled once per period: P^{1/2} through the eigendecomposition.
std::vector<MatrixXd> sqrt_schedule(const GainSchedule& sched) {
  std::vector<MatrixXd> out;
  out.reserve(sched.P.size());
  for (const auto& P : sched.P) out.push_back(sym_sqrt(P));
  return out;
}

double worst_of(const std::vector<double>& margins) {
  return margins.empty() ? 0.0 : *std::min_element(margins.begin(), margins.end());
}

struct Margins {
  std::vector<Violation> violations;
  std::vector<double> all;
  void add(int t, const std::string& name, double margin) {
    all.push_back(margin);
    if (margin < 0.0) violations.push_back({t, name, margin});
  }
};

double offset_term(const ControllerConfig& cfg, double B_bar) {
  return std::sqrt(cfg.sigma2) * B_bar * cfg.v_bar;
}

}  // namespace

GainSchedule GainSchedule::from_updates(const ControllerConfig& cfg,
                                        const std::vector<UpdateRecord>& updates) {
  GainSchedule s;
  s.T = cfg.T;
  s.K.push_back(cfg.K0);
  s.P.push_back(cfg.Q0.inverse());
  s.certified.push_back(true);
  for (const auto& u : updates) {
    s.K.push_back(u.K);
    s.P.push_back(u.P);
    s.certified.push_back(u.accepted);
  }
  return s;
}

GainSchedule GainSchedule::constant(const ControllerConfig& cfg, int horizon) {
  GainSchedule s;
  s.T = cfg.T;
  const MatrixXd P0 = cfg.Q0.inverse();
  for (int i = 0; i <= horizon / cfg.T; ++i) {
    s.K.push_back(cfg.K0);
    s.P.push_back(P0);
    s.certified.push_back(i == 0);
  }
  return s;
}

double check_initial_gain(const MatrixXd& A0, const MatrixXd& B0, const MatrixXd& K0,
                          const MatrixXd& P0, double lambda) {
  const MatrixXd Acl = A0 + B0 * K0;
  return min_eigenvalue(lambda * P0 - Acl.transpose() * P0 * Acl);
}

double b_bar(const MatrixTrajectory& traj) {
  double out = 0.0;
  for (const auto& B : traj.b_seq()) out = std::max(out, induced_two_norm(B));
  return out;
}

std::vector<Violation> lyapunov_step_check(const RunLog& log, const GainSchedule& sched,
                                           const ControllerConfig& cfg, double B_bar) {
  const auto roots = sqrt_schedule(sched);
  const double sl = std::sqrt(cfg.lambda);
  const double off = offset_term(cfg, B_bar);
  Margins m;
  for (std::size_t k = 0; k + 1 < log.rows.size(); ++k) {
    const LogRow& r = log.rows[k];
    const int i = sched.period_of(r.t);
    if (i >= sched.periods()) break;
    const double now = (roots[i] * r.x).norm();
    const double next = (roots[i] * log.rows[k + 1].x).norm();
    m.add(r.t, "lyapunov_step", sl * now + off + trace_tolerance(r.norm_x) - next);
  }
  return m.violations;
}

std::vector<double> q_trace(const RunLog& log, const GainSchedule& sched,
                            const ControllerConfig& cfg) {
  const auto roots = sqrt_schedule(sched);
  const double ratio = cfg.lambda_hat / cfg.lambda;
  std::vector<double> q;
  q.reserve(log.rows.size());
  for (const LogRow& r : log.rows) {
    const int i = std::min(sched.period_of(r.t), sched.periods() - 1);
    const double w = log_space_pow(ratio, 0.5 * (r.t - i * cfg.T));
    q.push_back(w * (roots[i] * r.x).norm());
  }
  return q;
}

std::vector<Violation> check_q_sandwich(const RunLog& log, const std::vector<double>& q,
                                        const ControllerConfig& cfg) {
  const double lo = std::sqrt(cfg.sigma1);
  const double hi = log_space_pow(cfg.lambda_hat / cfg.lambda, 0.5 * (cfg.T - 1)) *
                    std::sqrt(cfg.sigma2);
  Margins m;
  for (std::size_t k = 0; k < q.size() && k < log.rows.size(); ++k) {
    const LogRow& r = log.rows[k];
    const double tol = trace_tolerance(r.norm_x);
    m.add(r.t, "q_sandwich_lower", q[k] - lo * r.norm_x + tol);
    m.add(r.t, "q_sandwich_upper", hi * r.norm_x + tol - q[k]);
  }
  return m.violations;
}

std::vector<Violation> check_q_consecutive(const RunLog& log, const std::vector<double>& q,
                                           const ControllerConfig& cfg, double B_bar) {
  const double slh = std::sqrt(cfg.lambda_hat);
  const double off = log_space_pow(cfg.lambda_hat / cfg.lambda, 0.5 * cfg.T) *
                     offset_term(cfg, B_bar);
  Margins m;
  for (std::size_t k = 0; k + 1 < q.size() && k + 1 < log.rows.size(); ++k) {
    const LogRow& r = log.rows[k];
    m.add(r.t, "q_consecutive", slh * q[k] + off + trace_tolerance(r.norm_x) - q[k + 1]);
  }
  return m.violations;
}

double pges_bound(const ControllerConfig& cfg, double B_bar, double x0_norm, double t) {
  if (!(cfg.lambda_hat < 1.0)) throw ParameterError("lambda_hat must be < 1");
  if (B_bar < 0.0) throw ParameterError("B_bar must be >= 0");
  const double lead = cfg.sigma2 / std::sqrt(cfg.sigma1) *
                      log_space_pow(cfg.lambda_hat, 0.5 * t) * x0_norm;
  const double tail = std::sqrt(cfg.sigma2 / cfg.sigma1) /
                      (1.0 - std::sqrt(cfg.lambda_hat)) *
                      log_space_pow(cfg.lambda_hat / cfg.lambda, 0.5 * cfg.T) * B_bar *
                      cfg.v_bar;
  return lead + tail;
}

double unrolled_bound(const ControllerConfig& cfg, double B_bar, double x0_norm, int t) {
  const double slh = std::sqrt(cfg.lambda_hat);
  const double off = log_space_pow(cfg.lambda_hat / cfg.lambda, 0.5 * cfg.T) *
                     offset_term(cfg, B_bar);
  double q = std::sqrt(cfg.sigma2) * x0_norm;
  for (int k = 0; k < t; ++k) q = slh * q + off;
  return q / std::sqrt(cfg.sigma1);
}

bool check_dwell(double mu, double lambda, int T) {
  if (mu < 1.0) throw ParameterError("mu must be >= 1");
  if (!(lambda > 0.0 && lambda < 1.0)) throw ParameterError("lambda must lie in (0, 1)");
  return T > -std::log(mu) / std::log(lambda);
}

double switch_ratio(const GainSchedule& sched) {
  double mu = 1.0;
  for (int i = 0; i + 1 < sched.periods(); ++i) {
    const MatrixXd r = sym_sqrt(sched.P[i]).inverse();
    mu = std::max(mu, max_eigenvalue(r * sched.P[i + 1] * r));
  }
  return mu;
}

std::vector<Violation> set_membership_audit(const std::vector<UpdateRecord>& updates,
                                            const GainSchedule& sched,
                                            const MatrixTrajectory& traj,
                                            const ControllerConfig& cfg, int horizon) {
  std::vector<Violation> out;
  for (std::size_t u = 0; u < updates.size(); ++u) {
    const int i = static_cast<int>(u) + 1;
    if (i >= sched.periods()) break;
    const int ts = i * cfg.T;
    if (ts > horizon) break;
    const UpdateRecord& rec = updates[u];
    if (!sched.certified[i]) out.push_back({ts, "no_certificate", -1.0});
    if (rec.data.columns() > 0 && !sigma_i_contains(rec.data, traj.A(ts), traj.B(ts))) {
      out.push_back({ts, "sigma_i_membership", -1.0});
    }
    const MatrixXd& K = sched.K[i];
    const MatrixXd& P = sched.P[i];
    const int end = std::min((i + 1) * cfg.T - 1, horizon);
    for (int t = ts; t <= end; ++t) {
      const MatrixXd dA = traj.A(t) - traj.A(ts);
      const MatrixXd dB = traj.B(t) - traj.B(ts);
      if (!sigma_d_contains(dA, dB, cfg.L, cfg.T)) {
        out.push_back({t, "sigma_d_membership",
                       cfg.L * cfg.T - induced_two_norm(hcat(dA, dB))});
      }
      const MatrixXd Acl = traj.A(t) + traj.B(t) * K;
      const double margin = min_eigenvalue(cfg.lambda * P - Acl.transpose() * P * Acl) + 1e-7;
      if (margin < 0.0) out.push_back({t, "true_matrix_decrease", margin});
    }
  }
  return out;
}

StabilityReport analyze(const RunLog& log, const std::vector<UpdateRecord>& updates,
                        const MatrixTrajectory& traj, const ControllerConfig& cfg) {
  StabilityReport rep;
  const int horizon = log.rows.empty() ? 0 : log.rows.back().t;
  const GainSchedule sched = log.run_mode == "static"
                                 ? GainSchedule::constant(cfg, horizon)
                                 : GainSchedule::from_updates(cfg, updates);
  rep.B_bar = b_bar(traj);
  for (int i = 0; i < sched.periods(); ++i) {
    if (!sched.certified[i]) rep.uncertified_periods.push_back(i);
  }
  rep.initial_gain_margin =
      check_initial_gain(traj.A(0), traj.B(0), cfg.K0, sched.P[0], cfg.lambda);
  if (rep.initial_gain_margin < -1e-9) {
    rep.violations.push_back({0, "initial_gain", rep.initial_gain_margin});
  }

  auto margins_of = [](const std::vector<Violation>& v) {
    std::vector<double> m;
    for (const auto& x : v) m.push_back(x.margin);
    return m;
  };
  const int steps = std::max(0, static_cast<int>(log.rows.size()) - 1);

  const auto lyap = lyapunov_step_check(log, sched, cfg, rep.B_bar);
  collect(rep.violations, rep.checks, "lyapunov_step", lyap, steps, worst_of(margins_of(lyap)));

  rep.q_trace = q_trace(log, sched, cfg);
  const auto sand = check_q_sandwich(log, rep.q_trace, cfg);
  collect(rep.violations, rep.checks, "q_sandwich", sand, 2 * steps + 2,
          worst_of(margins_of(sand)));
  const auto cons = check_q_consecutive(log, rep.q_trace, cfg, rep.B_bar);
  collect(rep.violations, rep.checks, "q_consecutive", cons, steps, worst_of(margins_of(cons)));

  std::vector<Violation> pges;
  const double x0 = log.rows.empty() ? 0.0 : log.rows.front().norm_x;
  for (const LogRow& r : log.rows) {
    const double b = pges_bound(cfg, rep.B_bar, x0, r.t);
    rep.pges_bound_trace.push_back(b);
    if (r.norm_x > b) pges.push_back({r.t, "pges_bound", b - r.norm_x});
  }
  collect(rep.violations, rep.checks, "pges_bound", pges,
          static_cast<int>(log.rows.size()), worst_of(margins_of(pges)));

  const auto audit = set_membership_audit(updates, sched, traj, cfg, horizon);
  collect(rep.violations, rep.checks, "set_membership", audit,
          static_cast<int>(updates.size()), worst_of(margins_of(audit)));

  rep.mu = switch_ratio(sched);
  rep.dwell_ok = check_dwell(rep.mu, cfg.lambda, cfg.T);
  if (!rep.dwell_ok) rep.violations.push_back({0, "dwell_time", -std::log(rep.mu)});
  return rep;
}

std::string format_report(const StabilityReport& r, int max_violations) {
  std::ostringstream os;
  os.precision(6);
  os << "stability report\n";
  os << "  B_bar (max_t ||B(t)||_2) = " << r.B_bar << "\n";
  os << "  initial gain margin = " << r.initial_gain_margin << "\n";
  os << "  mu = " << r.mu << ", dwell " << (r.dwell_ok ? "ok" : "violated") << "\n";
  os << "  uncertified periods:";
  if (r.uncertified_periods.empty()) os << " none";
  for (int i : r.uncertified_periods) os << ' ' << i;
  os << "\n";
  for (const auto& c : r.checks) {
    os << "  " << c.name << ": " << c.violated << " violations";
    if (c.violated > 0) os << " (worst margin " << c.worst_margin << ")";
    os << "\n";
  }
  os << "  total violations: " << r.violations.size() << "\n";
  int shown = 0;
  for (const auto& v : r.violations) {
    if (shown++ >= max_violations) break;
    os << "    t=" << v.t << " " << v.check << " margin " << v.margin << "\n";
  }
  os << (r.passed() ? "PASS\n" : "FAIL\n");
  return os.str();
}

}  // namespace oddac
