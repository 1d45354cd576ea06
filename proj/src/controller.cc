#include "oddac/controller.h"

#include <cmath>

#include "oddac/errors.h"
#include "oddac/linalg.h"
#include "oddac/lmi.h"

namespace oddac {

void ControllerConfig::validate() const {
  if (T_W < 1 || T_W >= T) throw ConfigError("need 1 <= T_W < T");
  if (!(lambda > 0.0) || lambda > lambda_hat || !(lambda_hat < 1.0)) {
    throw ConfigError("need 0 < lambda <= lambda_hat < 1");
  }
  if (!(sigma1 > 0.0) || sigma1 > sigma2) throw ConfigError("need 0 < sigma1 <= sigma2");
  if (!(v_bar >= 0.0)) throw ConfigError("v_bar must be >= 0");
  if (!(L >= 0.0)) throw ConfigError("Lipschitz constant must be >= 0");
  if (K0.size() == 0 || Q0.rows() != K0.cols() || Q0.cols() != K0.cols()) {
    throw ConfigError("K0 must be m x n and Q0 n x n");
  }
  try {
    require_spd(Q0, "Q0");
  } catch (const MatrixError& e) {
    throw ConfigError(e.what());
  }
}

VectorXd Excitation::draw(int m, double v_bar) {
  VectorXd v(m);
  const double half = v_bar / std::sqrt(static_cast<double>(m));
  for (int k = 0; k < m; ++k) v(k) = half * (2.0 * uniform01() - 1.0);
  return v;
}

const char* to_string(StepMode mode) {
  switch (mode) {
    case StepMode::kPlain: return "plain";
    case StepMode::kExcite: return "excite";
    case StepMode::kSwitch: return "switch";
  }
  return "unknown";
}

std::shared_ptr<FeasibilityProgram> build_gain_program(const ControllerConfig& cfg,
                                                       const DataMatrices& normalized,
                                                       const MatrixXd& Q_prev,
                                                       const MatrixXd& K_prev) {
  const int n = normalized.n();
  const int m = normalized.m();
  auto prog = std::make_shared<FeasibilityProgram>(n, m);
  const LmiProblem p = build_problem(normalized, cfg.lambda, cfg.L, cfg.T);
  const SandwichConstraint sw = build_aux_sandwich(cfg.sigma1, cfg.sigma2, n);
  const DwellConstraint dw = build_aux_dwell(Q_prev, cfg.lambda, cfg.lambda_hat, cfg.T);
  prog->add_constraint("robust_lmi", [&p](const Decision& d) {
    return lmi_matrix(p, d.Q, d.Lmat, d.a1, d.a2);
  });
  prog->add_constraint("sandwich_lower",
                       [&sw](const Decision& d) { return sw.lower_matrix(d.Q); });
  prog->add_constraint("sandwich_upper",
                       [&sw](const Decision& d) { return sw.upper_matrix(d.Q); });
  prog->add_constraint("dwell",
                       [&dw](const Decision& d) { return dw.normalized_matrix(d.Q); });
  prog->add_multiplier_bounds();
  prog->set_initial_point({Q_prev, K_prev * Q_prev, 1.0, 1.0});
  return prog;
}

Controller::Controller(ControllerConfig cfg, std::shared_ptr<const SdpBackend> backend)
    : cfg_(std::move(cfg)), backend_(std::move(backend)), rng_(cfg_.seed) {
  cfg_.validate();
  if (!backend_) throw ConfigError("no SDP backend");
  state_.K = cfg_.K0;
  state_.Q_prev = cfg_.Q0;
  state_.window = DataWindow(cfg_.T_W, cfg_.T - cfg_.T_W);
}

StepOutput Controller::control_step(const VectorXd& x) {
  if (x.size() != cfg_.n()) throw DimensionError("state has wrong length");
  StepOutput out;
  const int t = state_.t;
  const int i_new = t / cfg_.T;
  if (state_.pending) {
    state_.window.push_sample(state_.pending->first, state_.pending->second, x);
    state_.pending.reset();
  }
  if (t - i_new * cfg_.T >= cfg_.T - cfg_.T_W) {
    out.u = state_.K * x + excitation();
    out.mode = StepMode::kExcite;
    state_.pending.emplace(x, out.u);
  } else {
    if (i_new != state_.i) {
      const UpdateRecord* rec = nullptr;
      try {
        const DataMatrices d = build_data_matrices(state_.window, cfg_.L);
        rec = &update_gain(d);
      } catch (const Error& e) {
        UpdateRecord r;
        r.error = e.what();
        r.cert.status = SolveStatus::kSolverFailure;
        r.cert.note = e.what();
        r.K = state_.K;
        r.P = updates_.empty() ? MatrixXd(cfg_.Q0.inverse()) : updates_.back().P;
        updates_.push_back(std::move(r));
        rec = &updates_.back();
        state_.degraded = true;
      }
      updates_.back().index = i_new;
      updates_.back().time = t;
      out.status = rec->cert.status;
      out.mode = StepMode::kSwitch;
      state_.i = i_new;
      state_.window.reset((i_new + 1) * cfg_.T - cfg_.T_W);
    }
    out.u = state_.K * x;
  }
  out.gain_index = state_.i;
  state_.t = t + 1;
  return out;
}

const UpdateRecord& Controller::update_gain(const DataMatrices& d) {
  UpdateRecord r;
  r.data = d;
  r.data_scale = data_normalization(d);
  const MatrixXd P_active =
      updates_.empty() ? MatrixXd(cfg_.Q0.inverse()) : updates_.back().P;
  try {
    r.program = build_gain_program(cfg_, d.scaled(r.data_scale), state_.Q_prev, state_.K);
    r.cert = solve(*r.program, *backend_);
  } catch (const Error& e) {
    r.error = e.what();
    r.cert.status = SolveStatus::kSolverFailure;
    r.cert.note = e.what();
  }
  r.accepted = r.cert.status == SolveStatus::kFeasible;
  if (r.accepted) {
    state_.K = r.cert.K;
    state_.Q_prev = r.cert.Q;
    state_.degraded = false;
    r.P = r.cert.P;
  } else {
    state_.degraded = true;
    r.P = P_active;
  }
  r.K = state_.K;
  updates_.push_back(std::move(r));
  return updates_.back();
}

}  // namespace oddac
