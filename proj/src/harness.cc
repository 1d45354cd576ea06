#include "oddac/harness.h"

#include <string>

#include "oddac/errors.h"

#ifndef ODDAC_VERSION
#define ODDAC_VERSION "0.0.0"
#endif

namespace oddac {

namespace {

MatrixXd rows(int r, int c, std::initializer_list<double> v) {
  MatrixXd out(r, c);
  auto it = v.begin();
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < c; ++j) out(i, j) = *it++;
  }
  return out;
}

std::vector<Keyframe> benchmark_keyframes() {
  const MatrixXd A0 = rows(5, 5, {-0.5, -0.4, 0.1, -0.8, -0.2,
                                  -0.5, -0.1, 0.2, 0.7, 0.0,
                                  -0.4, -0.9, 0.6, -0.3, 0.4,
                                  0.2, -0.3, -1.2, 0.0, -0.1,
                                  -0.6, 0.8, -0.5, -0.1, -0.1});
  const MatrixXd B0 = rows(5, 2, {-1.4, 2.2, 0.9, 1.4, 2.7, 0.5, -0.7, 1.5, 0.6, -1.9});
  const MatrixXd A5 = rows(5, 5, {-0.5, -0.7, 0.3, -0.6, 0.0,
                                  0.0, 0.0, 0.0, 0.8, 0.4,
                                  -0.7, -1.0, 0.7, 0.1, 0.2,
                                  -0.2, -0.2, -1.1, 0.3, 0.3,
                                  -0.9, 0.7, -0.9, 0.5, 0.4});
  const MatrixXd B5 = rows(5, 2, {-1.5, 2.4, 0.9, 1.3, 2.9, 0.7, -0.7, 1.5, 0.4, -1.9});
  const MatrixXd A10 = rows(5, 5, {0.0, -0.6, -0.2, -0.7, 0.5,
                                   0.0, 0.1, 0.4, 1.1, 0.7,
                                   -1.4, -0.9, 0.5, 0.5, 0.5,
                                   -0.2, -0.2, -1.5, -0.3, 0.5,
                                   -0.9, 0.5, -0.6, 0.7, 0.5});
  const MatrixXd B10 = rows(5, 2, {-1.4, 2.4, 0.9, 1.5, 3.0, 0.6, -0.8, 1.5, 0.5, -1.9});
  return {{0, A0, B0}, {500, A5, B5}, {1000, A10, B10}};
}

ControllerConfig benchmark_config() {
  ControllerConfig cfg;
  cfg.T = 100;
  cfg.T_W = 10;
  cfg.lambda = 0.9;
  cfg.lambda_hat = 0.91;
  cfg.sigma1 = 1e-3;
  cfg.sigma2 = 1e3;
  cfg.v_bar = 1e-10;
  cfg.seed = 0;
  cfg.K0 = rows(2, 5, {0.13, 0.26, -0.25, 0.04, -0.13, 0.08, 0.28, 0.13, 0.05, 0.01});
  cfg.Q0 = rows(5, 5, {0.75, -0.13, 0.03, -0.26, -0.08,
                       -0.13, 0.88, -0.08, -0.12, 0.36,
                       0.03, -0.08, 0.21, 0.01, -0.01,
                       -0.26, -0.12, 0.01, 0.43, 0.14,
                       -0.08, 0.36, -0.01, 0.14, 1.13});
  return cfg;
}

}  // namespace

const char* to_string(RunMode mode) {
  return mode == RunMode::kOddac ? "oddac" : "static";
}

RunMode parse_run_mode(const std::string& s) {
  if (s == "oddac") return RunMode::kOddac;
  if (s == "static") return RunMode::kStaticK0;
  throw ScenarioError("unknown mode '" + s + "'");
}

void Scenario::validate() const {
  if (!plant) throw ScenarioError("scenario has no plant");
  if (horizon < 0 || horizon > plant->horizon()) {
    throw ScenarioError("run horizon " + std::to_string(horizon) +
                        " exceeds plant horizon " + std::to_string(plant->horizon()));
  }
  if (x0.size() != plant->n()) throw ScenarioError("x0 length does not match the plant");
  if (cfg.K0.rows() != plant->m() || cfg.K0.cols() != plant->n()) {
    throw ScenarioError("K0 dimensions do not match the plant");
  }
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw ScenarioError(e.what());
  }
}

Scenario scenario_paper_ltv() {
  Scenario sc;
  sc.name = "paper-ltv";
  sc.horizon = 1000;
  sc.plant = std::make_shared<MatrixTrajectory>(
      make_keyframe_trajectory(benchmark_keyframes(), sc.horizon));
  sc.x0 = VectorXd::Ones(5);
  sc.cfg = benchmark_config();
  sc.cfg.L = estimate_lipschitz(*sc.plant);
  return sc;
}

Scenario scenario_paper_lti() {
  Scenario sc;
  sc.name = "paper-lti";
  sc.horizon = 1000;
  const Keyframe k0 = benchmark_keyframes().front();
  sc.plant = std::make_shared<MatrixTrajectory>(
      make_constant_trajectory(k0.A, k0.B, sc.horizon));
  sc.x0 = VectorXd::Ones(5);
  sc.cfg = benchmark_config();
  sc.cfg.L = 0.0;
  return sc;
}

bool RunLog::operator==(const RunLog& o) const {
  if (scenario_hash != o.scenario_hash || seed != o.seed || backend != o.backend ||
      version != o.version || run_mode != o.run_mode || n != o.n || m != o.m ||
      rows.size() != o.rows.size()) {
    return false;
  }
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const LogRow& a = rows[k];
    const LogRow& b = o.rows[k];
    if (a.t != b.t || a.x != b.x || a.u != b.u || a.norm_x != b.norm_x ||
        a.mode != b.mode || a.gain_index != b.gain_index ||
        a.solver_status != b.solver_status) {
      return false;
    }
  }
  return true;
}

RunResult run(const Scenario& sc) { return run(sc, backend_from_env()); }

RunResult run(const Scenario& sc, std::shared_ptr<const SdpBackend> backend) {
  sc.validate();
  RunResult res;
  RunLog& log = res.log;
  log.scenario_hash = scenario_hash(sc);
  log.seed = sc.cfg.seed;
  log.version = ODDAC_VERSION;
  log.run_mode = to_string(sc.mode);
  log.n = sc.plant->n();
  log.m = sc.plant->m();
  log.rows.reserve(sc.horizon + 1);

  std::optional<Controller> ctrl;
  if (sc.mode == RunMode::kOddac) {
    if (!backend) throw ScenarioError("no SDP backend");
    log.backend = backend->id();
    ctrl.emplace(sc.cfg, std::move(backend));
  } else {
    log.backend = "none";
  }

  PlantState s{sc.x0, 0};
  for (int t = 0; t <= sc.horizon; ++t) {
    LogRow row;
    row.t = t;
    row.x = s.x;
    row.norm_x = s.x.norm();
    if (ctrl) {
      const StepOutput out = ctrl->control_step(s.x);
      row.u = out.u;
      row.mode = to_string(out.mode);
      row.gain_index = out.gain_index;
      if (out.status) row.solver_status = to_string(*out.status);
    } else {
      row.u = sc.cfg.K0 * s.x;
      row.mode = "static";
      row.gain_index = 0;
    }
    if (t < sc.horizon) s = step(*sc.plant, s, row.u);
    log.rows.push_back(std::move(row));
  }
  if (ctrl) res.updates = ctrl->updates();
  return res;
}

Scenario resolve_scenario(const std::string& source) {
  if (source == "paper-ltv") return scenario_paper_ltv();
  if (source == "paper-lti") return scenario_paper_lti();
  return load_scenario(source);
}

}  // namespace oddac
