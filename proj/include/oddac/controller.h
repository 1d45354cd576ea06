#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "oddac/sdp.h"
#include "oddac/window.h"

namespace oddac {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct ControllerConfig {
  int T = 100;
  int T_W = 10;
  double lambda = 0.9;
  double lambda_hat = 0.91;
  double sigma1 = 1e-3;
  double sigma2 = 1e3;
  double v_bar = 0.0;
  double L = 0.0;
  std::uint64_t seed = 0;
  MatrixXd K0;
  MatrixXd Q0;

  int n() const { return static_cast<int>(K0.cols()); }
  int m() const { return static_cast<int>(K0.rows()); }

  /// Throws ConfigError unless 1 <= T_W < T, 0 < lambda <= lambda_hat < 1,
  /// 0 < sigma1 <= sigma2, v_bar >= 0, L >= 0, K0 is m x n and Q0 is n x n SPD.
  void validate() const;
};

/// Name of the excitation generator, recorded in log headers.
inline constexpr const char* kRngName = "mt19937_64/u53";

/// Uniform draws in [0, 1) from the top 53 bits of a mt19937_64 word; the
/// stream is identical on every platform.
class Excitation {
 public:
  explicit Excitation(std::uint64_t seed) : gen_(seed) {}

  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Each coordinate uniform in [-v_bar/sqrt(m), v_bar/sqrt(m)], so |v| <= v_bar.
  VectorXd draw(int m, double v_bar);

 private:
  std::mt19937_64 gen_;
};

enum class StepMode { kPlain, kExcite, kSwitch };

const char* to_string(StepMode mode);

/// One gain synthesis attempt at a switch instant.
struct UpdateRecord {
  int index = 0;  // new window index i
  int time = 0;   // switch instant i T
  DataMatrices data;
  double data_scale = 1.0;  // the program is built on data.scaled(data_scale)
  std::shared_ptr<const FeasibilityProgram> program;
  GainCertificate cert;
  bool accepted = false;
  MatrixXd K;  // gain active after the update
  MatrixXd P;  // Lyapunov matrix of that gain (previous one if rejected)
  std::string error;
};

struct ControllerState {
  int i = 0;
  int t = 0;
  MatrixXd K;
  MatrixXd Q_prev;
  DataWindow window{1, 0};
  std::optional<std::pair<VectorXd, VectorXd>> pending;  // (x(t), u(t)) awaiting x(t+1)
  bool degraded = false;  // the active gain lacks a certificate for this period
};

struct StepOutput {
  VectorXd u;
  StepMode mode = StepMode::kPlain;
  int gain_index = 0;
  std::optional<SolveStatus> status;  // set on switch steps only
};

class Controller {
 public:
  /// Throws ConfigError on an invalid configuration.
  Controller(ControllerConfig cfg, std::shared_ptr<const SdpBackend> backend);

  /// Issues u(t) for the current t and advances t.
  StepOutput control_step(const VectorXd& x);

  VectorXd excitation() { return rng_.draw(cfg_.m(), cfg_.v_bar); }

  /// Synthesizes the gain for the window data `d`. Failures keep the active
  /// gain and are carried in the returned record, never thrown.
  const UpdateRecord& update_gain(const DataMatrices& d);

  const ControllerConfig& config() const { return cfg_; }
  const ControllerState& state() const { return state_; }
  const std::vector<UpdateRecord>& updates() const { return updates_; }
  const SdpBackend& backend() const { return *backend_; }

 private:
  ControllerConfig cfg_;
  std::shared_ptr<const SdpBackend> backend_;
  ControllerState state_;
  Excitation rng_;
  std::vector<UpdateRecord> updates_;
};

/// The full program solved at a switch: the robust LMI on normalized data,
/// the sandwich pair, the dwell coupling with Q_prev, and multiplier bounds.
std::shared_ptr<FeasibilityProgram> build_gain_program(const ControllerConfig& cfg,
                                                       const DataMatrices& normalized,
                                                       const MatrixXd& Q_prev,
                                                       const MatrixXd& K_prev);

}  // namespace oddac
