#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oddac/analysis.h"
#include "oddac/controller.h"
#include "oddac/errors.h"
#include "oddac/harness.h"
#include "oddac/lmi.h"
#include "oddac/sdp.h"
#include "oddac/window.h"

namespace {

using namespace oddac;

void print_matrix(std::ostream& os, const char* name, const Eigen::MatrixXd& m) {
  os << name << " =\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    os << "  ";
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      os << (j ? " " : "") << format_double(m(i, j));
    }
    os << '\n';
  }
}

void print_updates(std::ostream& os, const std::vector<UpdateRecord>& updates) {
  for (const auto& u : updates) {
    os << "switch t=" << u.time << " i=" << u.index << " status=" << to_string(u.cert.status)
       << " margin=" << u.cert.margin;
    if (!u.cert.note.empty()) os << " (" << u.cert.note << ")";
    os << '\n';
  }
}

// Window file: header x1..xn,u1..um,x_next1..x_nextn; one row per sample,
// oldest first.
DataWindow read_window(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open window '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw ScenarioError("empty window file");
  int n = 0, m = 0, nn = 0;
  {
    std::stringstream hs(line);
    std::string col;
    while (std::getline(hs, col, ',')) {
      if (col.rfind("x_next", 0) == 0) ++nn;
      else if (!col.empty() && col[0] == 'x') ++n;
      else if (!col.empty() && col[0] == 'u') ++m;
      else throw ScenarioError("unexpected window column '" + col + "'");
    }
  }
  if (n == 0 || m == 0 || nn != n) throw ScenarioError("window header must list x, u, x_next");
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> r;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) r.push_back(std::stod(cell));
    if (static_cast<int>(r.size()) != 2 * n + m) throw ScenarioError("ragged window row");
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw ScenarioError("window has no samples");
  DataWindow w(static_cast<int>(rows.size()), 0);
  for (const auto& r : rows) {
    Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(r.data(), n);
    Eigen::VectorXd u = Eigen::Map<const Eigen::VectorXd>(r.data() + n, m);
    Eigen::VectorXd xn = Eigen::Map<const Eigen::VectorXd>(r.data() + n + m, n);
    w.push_sample(x, u, xn);
  }
  return w;
}

void write_window(const DataMatrices& d, std::ostream& os) {
  for (int i = 1; i <= d.n(); ++i) os << (i > 1 ? "," : "") << 'x' << i;
  for (int i = 1; i <= d.m(); ++i) os << ",u" << i;
  for (int i = 1; i <= d.n(); ++i) os << ",x_next" << i;
  os << '\n';
  for (int j = 0; j < d.columns(); ++j) {
    for (int i = 0; i < d.n(); ++i) os << (i ? "," : "") << format_double(d.X(i, j));
    for (int i = 0; i < d.m(); ++i) os << ',' << format_double(d.U(i, j));
    for (int i = 0; i < d.n(); ++i) os << ',' << format_double(d.X_plus(i, j));
    os << '\n';
  }
}

int cmd_run(const std::string& source, const std::string& mode, const long long* seed,
            const std::string& out, bool do_verify) {
  Scenario sc = resolve_scenario(source);
  if (!mode.empty()) sc.mode = parse_run_mode(mode);
  if (seed) sc.cfg.seed = static_cast<std::uint64_t>(*seed);
  const RunResult res = run(sc);
  if (!out.empty()) emit_csv(res.log, out);
  else write_csv(res.log, std::cout);
  std::ostream& info = out.empty() ? std::cerr : std::cout;
  print_updates(info, res.updates);
  info << "final |x| = " << format_double(res.log.rows.back().norm_x) << '\n';
  if (!do_verify) return 0;
  const StabilityReport rep = analyze(res.log, res.updates, *sc.plant, sc.cfg);
  info << format_report(rep);
  return rep.passed() ? 0 : 3;
}

int cmd_verify(const std::string& log_path, const std::string& source) {
  const RunLog logged = read_csv(log_path);
  Scenario sc = resolve_scenario(source);
  sc.cfg.seed = logged.seed;
  sc.mode = parse_run_mode(logged.run_mode.empty() ? "oddac" : logged.run_mode);
  if (static_cast<int>(logged.rows.size()) != sc.horizon + 1) {
    std::cout << "log has " << logged.rows.size() << " rows, scenario expects "
              << sc.horizon + 1 << '\n';
    return 3;
  }
  const RunResult replay = run(sc);
  bool ok = true;
  if (logged.scenario_hash != replay.log.scenario_hash) {
    std::cout << "scenario hash mismatch: log " << logged.scenario_hash << ", scenario "
              << replay.log.scenario_hash << '\n';
    ok = false;
  }
  RunLog replay_log = replay.log;
  replay_log.version = logged.version;
  if (!(replay_log == logged)) {
    std::cout << "replay differs from the logged trajectory\n";
    ok = false;
  }
  print_updates(std::cout, replay.updates);
  const StabilityReport rep = analyze(logged, replay.updates, *sc.plant, sc.cfg);
  std::cout << format_report(rep);
  return ok && rep.passed() ? 0 : 3;
}

int cmd_lmi_solve(const std::string& window_path, const std::string& source) {
  const Scenario sc = resolve_scenario(source);
  const DataWindow w = read_window(window_path);
  const DataMatrices d = build_data_matrices(w, sc.cfg.L);
  const double c = data_normalization(d);
  const auto prog = build_gain_program(sc.cfg, d.scaled(c), sc.cfg.Q0, sc.cfg.K0);
  const auto backend = backend_from_env();
  const GainCertificate cert = solve(*prog, *backend);
  std::cout << std::setprecision(17);
  std::cout << "backend " << cert.backend << "\nstatus " << to_string(cert.status)
            << "\nmargin " << cert.margin << "\nmargin_upper_bound " << cert.margin_upper_bound
            << "\niterations " << cert.iterations << "\ndata_scale " << c << '\n';
  if (!cert.note.empty()) std::cout << "note " << cert.note << '\n';
  for (const auto& r : cert.residuals) {
    std::cout << "residual " << r.name << ' ' << r.min_eigenvalue << '\n';
  }
  if (cert.status != SolveStatus::kFeasible) return 2;
  print_matrix(std::cout, "K", cert.K);
  print_matrix(std::cout, "P", cert.P);
  const VerificationReport rep = verify(cert, *prog, 1e-6);
  std::cout << "verify " << (rep.passed ? "pass" : "fail") << '\n';
  return rep.passed ? 0 : 2;
}

int cmd_export(const std::string& source, const std::string& out, int window_at) {
  Scenario sc = resolve_scenario(source);
  std::ofstream os(out, std::ios::binary);
  if (!os) throw ScenarioError("cannot write '" + out + "'");
  if (window_at < 0) {
    os << scenario_to_json(sc);
    return 0;
  }
  const RunResult res = run(sc);
  for (const auto& u : res.updates) {
    if (u.time == window_at) {
      write_window(u.data, os);
      return 0;
    }
  }
  throw ScenarioError("no switch at t=" + std::to_string(window_at));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online data-driven adaptive control for LTV systems"};
  app.require_subcommand(1);

  std::string scenario, mode, out, log_path, window;
  long long seed = 0;
  bool do_verify = false;
  int window_at = -1;

  auto* run_cmd = app.add_subcommand("run", "simulate a scenario and write the CSV log");
  run_cmd->add_option("--scenario", scenario, "file, paper-ltv or paper-lti")->required();
  run_cmd->add_option("--mode", mode, "oddac | static")
      ->check(CLI::IsMember({"oddac", "static"}));
  auto* seed_opt = run_cmd->add_option("--seed", seed, "excitation seed");
  run_cmd->add_option("--out", out, "CSV path (stdout if omitted)");
  run_cmd->add_flag("--verify", do_verify, "run the stability checks");

  auto* verify_cmd = app.add_subcommand("verify", "replay a log and run the checks");
  verify_cmd->add_option("--log", log_path)->required();
  verify_cmd->add_option("--scenario", scenario)->required();

  auto* lmi_cmd = app.add_subcommand("lmi-solve", "one-shot gain synthesis");
  lmi_cmd->add_option("--window", window, "window CSV")->required();
  lmi_cmd->add_option("--scenario", scenario, "parameter source")->default_val("paper-ltv");

  auto* export_cmd = app.add_subcommand("export", "write a scenario as JSON or a window CSV");
  export_cmd->add_option("--scenario", scenario)->required();
  export_cmd->add_option("--out", out)->required();
  export_cmd->add_option("--window-at", window_at, "switch time whose window to export");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run_cmd) {
      return cmd_run(scenario, mode, seed_opt->count() ? &seed : nullptr, out, do_verify);
    }
    if (*verify_cmd) return cmd_verify(log_path, scenario);
    if (*lmi_cmd) return cmd_lmi_solve(window, scenario);
    if (*export_cmd) return cmd_export(scenario, out, window_at);
  } catch (const oddac::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
