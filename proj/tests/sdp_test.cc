#include "oddac/sdp.h"

#include <cstdlib>
#include <random>

#include <gtest/gtest.h>

#include "oddac/controller.h"
#include "oddac/errors.h"
#include "oddac/harness.h"
#include "oracles.h"

namespace oddac {
namespace {

MatrixXd eye(int n) { return MatrixXd::Identity(n, n); }

FeasibilityProgram interval_program(double lo, double hi) {
  FeasibilityProgram p(2, 1);
  p.add_constraint("lower", [lo](const Decision& d) { return MatrixXd(d.Q - lo * eye(2)); });
  p.add_constraint("upper", [hi](const Decision& d) { return MatrixXd(hi * eye(2) - d.Q); });
  return p;
}

GTEST_TEST(Layout, RoundTrip) {
  const DecisionLayout l{3, 2};
  EXPECT_EQ(l.size(), 6 + 6 + 2);
  std::mt19937_64 rng(1);
  const MatrixXd Q = testing::random_spd(rng, 3);
  const MatrixXd L = testing::random_matrix(rng, 2, 3);
  const Decision back = l.decode(l.encode({Q, L, 0.5, 7.0}));
  EXPECT_TRUE(back.Q.isApprox(Q));
  EXPECT_TRUE(back.Lmat.isApprox(L));
  EXPECT_EQ(back.a1, 0.5);
  EXPECT_EQ(back.a2, 7.0);
  EXPECT_THROW(l.decode(VectorXd::Zero(3)), DimensionError);
}

GTEST_TEST(Program, RejectsMalformedMaps) {
  FeasibilityProgram p(2, 1);
  EXPECT_THROW(p.validate(), ProgramError);
  EXPECT_THROW(p.add_constraint("rect", [](const Decision&) { return MatrixXd::Zero(2, 3); }),
               ProgramError);
  EXPECT_THROW(p.add_constraint("asym",
                                [](const Decision& d) {
                                  MatrixXd m = d.Q;
                                  m(0, 1) += d.Lmat(0, 0);
                                  return m;
                                }),
               ProgramError);
  EXPECT_THROW(p.add_constraint("quad", [](const Decision& d) { return MatrixXd(d.Q * d.Q); }),
               ProgramError);
  EXPECT_THROW(p.add_constraint("grow",
                                [](const Decision& d) {
                                  return d.a1 > 0.0 ? MatrixXd(eye(3)) : MatrixXd(eye(2));
                                }),
               ProgramError);
  EXPECT_TRUE(p.constraints().empty());
  EXPECT_THROW(FeasibilityProgram(0, 1), DimensionError);
}

GTEST_TEST(Program, RecoversAffineData) {
  FeasibilityProgram p(2, 1);
  p.add_constraint("f", [](const Decision& d) {
    MatrixXd m = 2.0 * d.Q + d.a1 * eye(2);
    m(0, 0) += 3.0 * d.Lmat(0, 1) - 1.0;
    return m;
  });
  ASSERT_EQ(p.constraints().size(), 1u);
  const AffineConstraint& c = p.constraints()[0];
  const VectorXd y = p.layout().encode({MatrixXd::Constant(2, 2, 0.5), MatrixXd::Ones(1, 2), 4.0, 0.0});
  MatrixXd expect = MatrixXd::Constant(2, 2, 1.0) + 4.0 * eye(2);
  expect(0, 0) += 2.0;
  EXPECT_TRUE(c.evaluate(y).isApprox(expect));
  EXPECT_EQ(c.coeffs[p.layout().alpha2_index()].size(), 0);
}

GTEST_TEST(Backend, Selection) {
  EXPECT_EQ(make_backend("barrier")->id(), "barrier-newton/1");
  EXPECT_EQ(make_backend("")->id(), "barrier-newton/1");
  EXPECT_THROW(make_backend("nonesuch"), ParameterError);
  ::setenv(kBackendEnvVar, "nonesuch", 1);
  EXPECT_THROW(backend_from_env(), ParameterError);
  ::unsetenv(kBackendEnvVar);
  EXPECT_EQ(backend_from_env()->id(), "barrier-newton/1");
}

GTEST_TEST(Solve, IntervalFeasibility) {
  const FeasibilityProgram p = interval_program(1.0, 2.0);
  const BarrierBackend backend;
  const GainCertificate cert = solve(p, backend);
  ASSERT_EQ(cert.status, SolveStatus::kFeasible);
  const auto ev = testing::jacobi_eigenvalues(cert.Q);
  EXPECT_GE(ev.front(), 1.0 - 1e-6);
  EXPECT_LE(ev.back(), 2.0 + 1e-6);
  EXPECT_TRUE(verify(cert, p, 1e-6).passed);
  // The analytic center of [I, 2I] maximizes the margin at 0.5.
  EXPECT_NEAR(cert.margin, 0.5, 1e-6);
}

GTEST_TEST(Solve, EmptyIntervalIsInfeasible) {
  const GainCertificate cert = solve(interval_program(2.0, 1.0), BarrierBackend());
  EXPECT_EQ(cert.status, SolveStatus::kInfeasible);
  EXPECT_LT(cert.margin_upper_bound, 0.0);
  EXPECT_NEAR(cert.margin_upper_bound, -0.5, 1e-6);
}

GTEST_TEST(Verify, DetectsCorruption) {
  const FeasibilityProgram p = interval_program(0.5, 4.0);
  GainCertificate cert;
  cert.Q = eye(2);
  cert.Lmat = MatrixXd::Zero(1, 2);
  cert.P = eye(2);
  cert.K = MatrixXd::Zero(1, 2);
  const VerificationReport ok = verify(cert, p, 1e-6);
  EXPECT_TRUE(ok.passed);
  for (const auto& r : ok.residuals) EXPECT_GE(r.min_eigenvalue, 0.0) << r.name;

  GainCertificate bad = cert;
  bad.Q(1, 1) = -1.0;
  const VerificationReport rep = verify(bad, p, 1e-6);
  EXPECT_FALSE(rep.passed);
  bool q_spd_failed = false;
  for (const auto& r : rep.residuals) {
    if (r.name == "Q_spd") q_spd_failed = r.min_eigenvalue < 0.0;
  }
  EXPECT_TRUE(q_spd_failed);

  GainCertificate inconsistent = cert;
  inconsistent.K(0, 0) = 1.0;
  EXPECT_FALSE(verify(inconsistent, p, 1e-6).passed);
}

// Noise-free window of the frozen benchmark pair with random inputs.
DataMatrices lti_window(const Scenario& sc, int cols) {
  const MatrixXd& A = sc.plant->A(0);
  const MatrixXd& B = sc.plant->B(0);
  std::mt19937_64 rng(9);
  DataMatrices d;
  d.X.resize(A.rows(), cols);
  d.U = testing::random_matrix(rng, static_cast<int>(B.cols()), cols);
  d.X_plus.resize(A.rows(), cols);
  VectorXd x = sc.x0;
  for (int k = 0; k < cols; ++k) {
    d.X.col(k) = x;
    x = A * x + B * d.U.col(k);
    d.X_plus.col(k) = x;
  }
  d.pi = 0.0;
  return d;
}

GTEST_TEST(Solve, GainProgramOnExactData) {
  const Scenario sc = scenario_paper_lti();
  const DataMatrices d = lti_window(sc, 10);
  const auto prog = build_gain_program(sc.cfg, d.scaled(data_normalization(d)), sc.cfg.Q0, sc.cfg.K0);
  const GainCertificate cert = solve(*prog, BarrierBackend());
  ASSERT_EQ(cert.status, SolveStatus::kFeasible) << cert.note;
  EXPECT_TRUE(verify(cert, *prog, 1e-6).passed);
  // The synthesized gain contracts the true pair at rate lambda in the P metric.
  const MatrixXd Acl = sc.plant->A(0) + sc.plant->B(0) * cert.K;
  EXPECT_GE(testing::jacobi_min_eigenvalue(sc.cfg.lambda * cert.P - Acl.transpose() * cert.P * Acl),
            -1e-7);

  ControllerConfig wide = sc.cfg;
  wide.L = 1000.0 * 0.003614103760706781;
  const auto big = build_gain_program(wide, d.scaled(data_normalization(d)), sc.cfg.Q0, sc.cfg.K0);
  EXPECT_NE(solve(*big, BarrierBackend()).status, SolveStatus::kFeasible);
}

}  // namespace
}  // namespace oddac
