#include "oddac/analysis.h"

#include <cmath>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <gtest/gtest.h>

#include "oddac/errors.h"
#include "oddac/harness.h"
#include "oracles.h"

namespace oddac {
namespace {

using Big = boost::multiprecision::cpp_bin_float_50;

MatrixXd eye(int n) { return MatrixXd::Identity(n, n); }

Big big_pges(const ControllerConfig& cfg, double B_bar, double x0, double t) {
  const Big s1(cfg.sigma1), s2(cfg.sigma2), lh(cfg.lambda_hat), l(cfg.lambda);
  const Big lead = s2 / sqrt(s1) * pow(lh, Big(t) / 2) * Big(x0);
  const Big tail = sqrt(s2 / s1) / (1 - sqrt(lh)) * pow(lh / l, Big(cfg.T) / 2) * Big(B_bar) *
                   Big(cfg.v_bar);
  return lead + tail;
}

GTEST_TEST(InitialGain, HandCases) {
  EXPECT_NEAR(check_initial_gain(0.5 * eye(2), MatrixXd::Zero(2, 1), MatrixXd::Zero(1, 2), eye(2), 0.9),
              0.65, 1e-15);
  EXPECT_NEAR(check_initial_gain(eye(2), MatrixXd::Zero(2, 1), MatrixXd::Zero(1, 2), eye(2), 0.9),
              -0.1, 1e-15);
}

GTEST_TEST(InitialGain, Benchmark) {
  const Scenario sc = scenario_paper_ltv();
  const double margin = check_initial_gain(sc.plant->A(0), sc.plant->B(0), sc.cfg.K0,
                                           sc.cfg.Q0.inverse(), sc.cfg.lambda);
  EXPECT_NEAR(margin, 0.12019647327372893, 1e-10);
  const MatrixXd P = sc.cfg.Q0.inverse();
  const MatrixXd Acl = sc.plant->A(0) + sc.plant->B(0) * sc.cfg.K0;
  EXPECT_NEAR(margin, testing::jacobi_min_eigenvalue(0.9 * P - Acl.transpose() * P * Acl), 1e-10);
}

GTEST_TEST(BBar, Benchmark) {
  const Scenario sc = scenario_paper_ltv();
  EXPECT_NEAR(b_bar(*sc.plant), 3.9915074699052524, 1e-12);
  double oracle = 0.0;
  for (int t = 0; t <= 1000; t += 50) oracle = std::max(oracle, testing::power_two_norm(sc.plant->B(t)));
  EXPECT_LE(oracle, b_bar(*sc.plant) + 1e-10);
}

GTEST_TEST(Pges, MatchesMultiprecision) {
  const ControllerConfig cfg = scenario_paper_ltv().cfg;
  const double x0 = std::sqrt(5.0);
  const double bb = 3.9915074699052524;
  for (double t : {0.0, 1.0, 37.0, 100.0, 999.0, 1000.0}) {
    const double ref = static_cast<double>(big_pges(cfg, bb, x0, t));
    EXPECT_NEAR(pges_bound(cfg, bb, x0, t), ref, 1e-13 * ref) << t;
  }
  EXPECT_NEAR(pges_bound(cfg, bb, x0, 0), 70710.678133712140, 1e-9);
  EXPECT_NEAR(pges_bound(cfg, bb, x0, 1000), 1.505738750318018e-05, 1e-17);
}

GTEST_TEST(Pges, Limits) {
  ControllerConfig cfg = scenario_paper_ltv().cfg;
  cfg.v_bar = 0.0;
  EXPECT_NEAR(pges_bound(cfg, 4.0, 2.0, 10),
              cfg.sigma2 / std::sqrt(cfg.sigma1) * std::pow(0.91, 5.0) * 2.0, 1e-9);
  cfg.lambda_hat = 1.0;
  EXPECT_THROW(pges_bound(cfg, 4.0, 2.0, 0), ParameterError);
  cfg.lambda_hat = 0.91;
  EXPECT_THROW(pges_bound(cfg, -1.0, 2.0, 0), ParameterError);
}

GTEST_TEST(Pges, DominatesUnrolledRecursion) {
  const ControllerConfig cfg = scenario_paper_ltv().cfg;
  for (int t : {0, 1, 10, 100, 500, 1000}) {
    EXPECT_LE(unrolled_bound(cfg, 3.99, 2.0, t), pges_bound(cfg, 3.99, 2.0, t) * (1 + 1e-12)) << t;
  }
}

GTEST_TEST(Dwell, Threshold) {
  EXPECT_TRUE(check_dwell(2.0, 0.9, 7));
  EXPECT_FALSE(check_dwell(2.0, 0.9, 6));
  // ln 2 / -ln 0.9 = 6.578813478960583783
  EXPECT_NEAR(std::log(2.0) / -std::log(0.9), 6.578813478960583783, 1e-14);
  EXPECT_TRUE(check_dwell(1.0, 0.9, 1));
  EXPECT_FALSE(check_dwell(1.5, 1.0 - 1e-12, 1000000));
  EXPECT_THROW(check_dwell(0.5, 0.9, 10), ParameterError);
  EXPECT_THROW(check_dwell(2.0, 1.0, 10), ParameterError);
}

GTEST_TEST(Dwell, SwitchRatio) {
  GainSchedule s;
  s.T = 10;
  s.K = {MatrixXd::Zero(1, 2)};
  s.P = {eye(2)};
  s.certified = {true};
  EXPECT_EQ(switch_ratio(s), 1.0);
  MatrixXd P1(2, 2);
  P1 << 4, 0, 0, 0.5;
  s.K.push_back(MatrixXd::Zero(1, 2));
  s.P.push_back(P1);
  s.certified.push_back(true);
  EXPECT_NEAR(switch_ratio(s), 4.0, 1e-12);
}

class LtiRun : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    sc_ = new Scenario(scenario_paper_lti());
    res_ = new RunResult(run(*sc_, make_backend("barrier")));
  }
  static void TearDownTestSuite() {
    delete res_;
    delete sc_;
  }
  static Scenario* sc_;
  static RunResult* res_;
};
Scenario* LtiRun::sc_ = nullptr;
RunResult* LtiRun::res_ = nullptr;

TEST_F(LtiRun, AllChecksPass) {
  const StabilityReport rep = analyze(res_->log, res_->updates, *sc_->plant, sc_->cfg);
  EXPECT_TRUE(rep.passed()) << format_report(rep);
  EXPECT_TRUE(rep.uncertified_periods.empty());
  EXPECT_TRUE(rep.dwell_ok);
  EXPECT_EQ(rep.q_trace.size(), res_->log.rows.size());
}

GTEST_TEST(Lti, StrictContractionWithoutExcitation) {
  Scenario sc = scenario_paper_lti();
  sc.cfg.v_bar = 0.0;
  const RunResult res = run(sc, make_backend("barrier"));
  // Closed-loop data with u = K0 x cannot pin (A, B); K0 stays active.
  for (const auto& u : res.updates) EXPECT_FALSE(u.accepted) << u.time;
  const GainSchedule sched = GainSchedule::from_updates(sc.cfg, res.updates);
  EXPECT_TRUE(lyapunov_step_check(res.log, sched, sc.cfg, 0.0).empty());
}

TEST_F(LtiRun, QAtSwitchInstants) {
  const GainSchedule sched = GainSchedule::from_updates(sc_->cfg, res_->updates);
  const auto q = q_trace(res_->log, sched, sc_->cfg);
  for (int t = 0; t <= 1000; t += 100) {
    const int i = t / 100;
    const MatrixXd& P = sched.P[i];
    const VectorXd& x = res_->log.rows[t].x;
    EXPECT_NEAR(q[t], std::sqrt(x.dot(P * x)), 1e-12 * (1 + q[t])) << t;
  }
}

TEST_F(LtiRun, CorruptedGainIsCaught) {
  GainSchedule sched = GainSchedule::from_updates(sc_->cfg, res_->updates);
  for (auto& K : sched.K) K = -K;
  ASSERT_TRUE(lyapunov_step_check(res_->log, GainSchedule::from_updates(sc_->cfg, res_->updates),
                                  sc_->cfg, b_bar(*sc_->plant)).empty());
  // Replay the plant under the negated gains so the log reflects them.
  RunLog log = res_->log;
  PlantState s{sc_->x0, 0};
  for (int t = 0; t <= 300; ++t) {
    log.rows[t].x = s.x;
    log.rows[t].norm_x = s.x.norm();
    s = step(*sc_->plant, s, sched.K[t / 100] * s.x);
  }
  log.rows.resize(301);
  EXPECT_FALSE(lyapunov_step_check(log, sched, sc_->cfg, b_bar(*sc_->plant)).empty());
}

TEST_F(LtiRun, ConstantPlantHasNoDrift) {
  const GainSchedule sched = GainSchedule::from_updates(sc_->cfg, res_->updates);
  EXPECT_TRUE(set_membership_audit(res_->updates, sched, *sc_->plant, sc_->cfg, 1000).empty());
}

GTEST_TEST(Audit, ShrunkenDriftBallIsFlagged) {
  Scenario sc = scenario_paper_ltv();
  sc.horizon = 300;
  const RunResult res = run(sc, make_backend("barrier"));
  const GainSchedule sched = GainSchedule::from_updates(sc.cfg, res.updates);
  auto count = [&](const ControllerConfig& cfg, const std::string& name) {
    int k = 0;
    for (const auto& v : set_membership_audit(res.updates, sched, *sc.plant, cfg, sc.horizon)) {
      k += v.check == name;
    }
    return k;
  };
  EXPECT_EQ(count(sc.cfg, "sigma_d_membership"), 0);
  ControllerConfig half = sc.cfg;
  half.L *= 0.5;
  EXPECT_GT(count(half, "sigma_d_membership"), 0);
}

GTEST_TEST(Schedule, ConstantGain) {
  const ControllerConfig cfg = scenario_paper_ltv().cfg;
  const GainSchedule s = GainSchedule::constant(cfg, 1000);
  EXPECT_EQ(s.periods(), 11);
  EXPECT_TRUE(s.certified[0]);
  EXPECT_FALSE(s.certified[1]);
  EXPECT_EQ(s.period_of(999), 9);
  EXPECT_NEAR(switch_ratio(s), 1.0, 1e-12);
}

}  // namespace
}  // namespace oddac
