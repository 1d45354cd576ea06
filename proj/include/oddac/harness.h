#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "oddac/controller.h"
#include "oddac/plant.h"
#include "oddac/sdp.h"

namespace oddac {

enum class RunMode { kOddac, kStaticK0 };

const char* to_string(RunMode mode);
RunMode parse_run_mode(const std::string& s);  // "oddac" | "static"

struct Scenario {
  std::string name;
  std::shared_ptr<const MatrixTrajectory> plant;
  VectorXd x0;
  ControllerConfig cfg;
  int horizon = 0;
  RunMode mode = RunMode::kOddac;

  /// Throws ScenarioError on inconsistent dimensions or horizon.
  void validate() const;
};

/// Keyframes, gains and initial state of the benchmark 5-state, 2-input LTV
/// plant. The Lipschitz constant is estimated from the interpolated matrices.
Scenario scenario_paper_ltv();

/// The same plant frozen at its t = 0 matrices, with L = 0.
Scenario scenario_paper_lti();

struct LogRow {
  int t = 0;
  VectorXd x;
  VectorXd u;
  double norm_x = 0.0;
  std::string mode;  // plain | excite | switch | static
  int gain_index = 0;
  std::string solver_status;  // empty except on switch rows
};

struct RunLog {
  std::string scenario_hash;
  std::uint64_t seed = 0;
  std::string backend;
  std::string version;
  std::string run_mode;
  int n = 0;
  int m = 0;
  std::vector<LogRow> rows;

  bool operator==(const RunLog& o) const;
};

struct RunResult {
  RunLog log;
  std::vector<UpdateRecord> updates;
};

/// Closed-loop simulation for t = 0..horizon: u(t) is issued and logged at
/// every t, the plant is stepped for t < horizon.
RunResult run(const Scenario& sc, std::shared_ptr<const SdpBackend> backend);

/// Uses backend_from_env().
RunResult run(const Scenario& sc);

/// Columns t, x1..xn, u1..um, norm_x, mode, gain_index, solver_status after a
/// block of '#'-prefixed header lines. Doubles carry 17 significant digits.
void write_csv(const RunLog& log, std::ostream& os);
void emit_csv(const RunLog& log, const std::string& path);
RunLog parse_csv(std::istream& is);
RunLog read_csv(const std::string& path);

/// Shortest-form double formatting with 17 significant digits, '.' separator.
std::string format_double(double v);

/// JSON scenario files. Keyframe plants are stored as keyframes, constant
/// plants as a single pair; explicit trajectories are not serializable.
Scenario scenario_from_json(const std::string& text);
std::string scenario_to_json(const Scenario& sc);
Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& sc, const std::string& path);

/// Resolves "paper-ltv", "paper-lti" or a file path.
Scenario resolve_scenario(const std::string& source);

/// FNV-1a 64 over the canonical JSON form, as 16 hex digits.
std::string scenario_hash(const Scenario& sc);

}  // namespace oddac
