#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oddac/analysis.h"
#include "oddac/harness.h"
#include "oddac/window.h"
#include "oracles.h"

namespace oddac {
namespace {

// The benchmark plant with its keyframes spread `stretch` times further
// apart: the same matrices, a drift rate `stretch` times slower.
Scenario stretched_ltv(int stretch) {
  Scenario sc = scenario_paper_ltv();
  auto frames = std::get<KeyframeSource>(sc.plant->source()).keyframes;
  for (auto& f : frames) f.time *= stretch;
  const int end = frames.back().time;
  sc.plant = std::make_shared<MatrixTrajectory>(make_keyframe_trajectory(frames, end));
  sc.cfg.L = estimate_lipschitz(*sc.plant);
  sc.name = "stretched";
  return sc;
}

class SlowDrift : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    sc_ = new Scenario(stretched_ltv(5));
    res_ = new RunResult(run(*sc_, make_backend("barrier")));
  }
  static void TearDownTestSuite() {
    delete res_;
    delete sc_;
  }
  static Scenario* sc_;
  static RunResult* res_;
};
Scenario* SlowDrift::sc_ = nullptr;
RunResult* SlowDrift::res_ = nullptr;

TEST_F(SlowDrift, EverySwitchCertified) {
  EXPECT_LT(sc_->cfg.L, 0.001);
  ASSERT_EQ(res_->updates.size(), 10u);
  for (const auto& u : res_->updates) {
    EXPECT_EQ(u.cert.status, SolveStatus::kFeasible) << "t=" << u.time << " " << u.cert.note;
    ASSERT_TRUE(u.program);
    EXPECT_TRUE(verify(u.cert, *u.program, 1e-6).passed) << u.time;
  }
}

TEST_F(SlowDrift, StabilityChecksPass) {
  const StabilityReport rep = analyze(res_->log, res_->updates, *sc_->plant, sc_->cfg);
  EXPECT_TRUE(rep.passed()) << format_report(rep);
  EXPECT_LT(res_->log.rows.back().norm_x, 1e-6);
}

TEST_F(SlowDrift, CertificatesHoldOverSampledUncertainty) {
  // Rejection-sample (A, B) = (A_c + E, B_c + F) + drift around the least
  // squares fit and check the decrease condition for each accepted gain.
  std::mt19937_64 rng(17);
  const ControllerConfig& cfg = sc_->cfg;
  int checked = 0;
  for (const auto& u : res_->updates) {
    if (!u.accepted) continue;
    const DataMatrices& d = u.data;
    MatrixXd Z(d.n() + d.m(), d.columns());
    Z << d.X, d.U;
    const MatrixXd AB = d.X_plus * Z.completeOrthogonalDecomposition().pseudoInverse();
    const MatrixXd A = AB.leftCols(d.n());
    const MatrixXd B = AB.rightCols(d.m());
    int drawn = 0;
    for (int attempt = 0; attempt < 20000 && drawn < 50; ++attempt) {
      const double scale = std::pow(10.0, -3.0 - 3.0 * (attempt % 4) / 3.0);
      const MatrixXd Ai = A + testing::random_matrix(rng, d.n(), d.n(), scale);
      const MatrixXd Bi = B + testing::random_matrix(rng, d.n(), d.m(), scale);
      if (!sigma_i_contains(d, Ai, Bi)) continue;
      MatrixXd dA = testing::random_matrix(rng, d.n(), d.n());
      MatrixXd dB = testing::random_matrix(rng, d.n(), d.m());
      const double r = cfg.L * cfg.T * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      const double nrm = testing::power_two_norm((MatrixXd(d.n(), d.n() + d.m()) << dA, dB).finished());
      dA *= r / nrm;
      dB *= r / nrm;
      ASSERT_TRUE(sigma_d_contains(dA, dB, cfg.L, cfg.T));
      const MatrixXd Acl = Ai + dA + (Bi + dB) * u.K;
      EXPECT_GE(testing::jacobi_min_eigenvalue(cfg.lambda * u.P - Acl.transpose() * u.P * Acl),
                -1e-7);
      ++drawn;
    }
    EXPECT_GT(drawn, 0) << u.time;
    ++checked;
  }
  EXPECT_EQ(checked, 10);
}

GTEST_TEST(Lti, ExcitedRunPasses) {
  const Scenario sc = scenario_paper_lti();
  const RunResult res = run(sc, make_backend("barrier"));
  for (const auto& u : res.updates) EXPECT_TRUE(u.accepted) << u.time;
  const StabilityReport rep = analyze(res.log, res.updates, *sc.plant, sc.cfg);
  EXPECT_TRUE(rep.passed()) << format_report(rep);
}

GTEST_TEST(Ltv, BenchmarkRunFallsBackWithoutThrowing) {
  const Scenario sc = scenario_paper_ltv();
  const RunResult res = run(sc, make_backend("barrier"));
  ASSERT_EQ(res.updates.size(), 10u);
  MatrixXd active = sc.cfg.K0;
  for (const auto& u : res.updates) {
    if (u.accepted) {
      active = u.cert.K;
    } else {
      EXPECT_NE(u.cert.status, SolveStatus::kFeasible);
    }
    EXPECT_EQ(u.K, active) << u.time;
  }
}

}  // namespace
}  // namespace oddac
