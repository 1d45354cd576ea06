#include "oddac/sdp.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "oddac/errors.h"
#include "oddac/linalg.h"

namespace oddac {

namespace {

constexpr double kFeasibleMargin = -1e-9;
constexpr double kResidualTolerance = -1e-6;

double max_abs(const MatrixXd& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

// Deterministic off-basis probe point for the affinity check.
VectorXd probe_point(int size) {
  VectorXd y(size);
  for (int i = 0; i < size; ++i) y(i) = std::sin(1.7 * (i + 1)) + 0.25;
  return y;
}

}  // namespace

VectorXd DecisionLayout::encode(const Decision& d) const {
  if (d.Q.rows() != n || d.Q.cols() != n || d.Lmat.rows() != m ||
      d.Lmat.cols() != n) {
    throw DimensionError("decision does not match the layout");
  }
  VectorXd y(size());
  int k = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) y(k++) = 0.5 * (d.Q(i, j) + d.Q(j, i));
  }
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < m; ++i) y(k++) = d.Lmat(i, j);
  }
  y(alpha1_index()) = d.a1;
  y(alpha2_index()) = d.a2;
  return y;
}

Decision DecisionLayout::decode(const VectorXd& y) const {
  if (y.size() != size()) throw DimensionError("decision vector has wrong length");
  Decision d{MatrixXd(n, n), MatrixXd(m, n), 0.0, 0.0};
  int k = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      d.Q(i, j) = y(k);
      d.Q(j, i) = y(k);
      ++k;
    }
  }
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < m; ++i) d.Lmat(i, j) = y(k++);
  }
  d.a1 = y(alpha1_index());
  d.a2 = y(alpha2_index());
  return d;
}

MatrixXd AffineConstraint::evaluate(const VectorXd& y) const {
  MatrixXd out = constant;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    if (coeffs[i].size() != 0) out += y(static_cast<Eigen::Index>(i)) * coeffs[i];
  }
  return out;
}

FeasibilityProgram::FeasibilityProgram(int n, int m) : layout_{n, m} {
  if (n < 1 || m < 1) throw DimensionError("program needs n >= 1 and m >= 1");
  initial_ = VectorXd::Zero(layout_.size());
  Decision d{MatrixXd::Identity(n, n), MatrixXd::Zero(m, n), 1.0, 1.0};
  initial_ = layout_.encode(d);
}

void FeasibilityProgram::add_constraint(std::string name, const AffineMap& f) {
  const int k = layout_.size();
  const MatrixXd c0 = f(layout_.decode(VectorXd::Zero(k)));
  if (c0.rows() != c0.cols() || c0.rows() == 0) {
    throw ProgramError("constraint '" + name + "' is not a square matrix");
  }
  const double scale = std::max(1.0, max_abs(c0));
  AffineConstraint c{name, 0.5 * (c0 + c0.transpose()), {}};
  if (!is_symmetric(c0, 1e-12)) {
    throw ProgramError("constraint '" + name + "' is not symmetric");
  }
  c.coeffs.resize(k);
  for (int i = 0; i < k; ++i) {
    VectorXd e = VectorXd::Zero(k);
    e(i) = 1.0;
    const MatrixXd fi = f(layout_.decode(e));
    if (fi.rows() != c0.rows() || fi.cols() != c0.cols()) {
      throw ProgramError("constraint '" + name + "' changes size");
    }
    const MatrixXd a = fi - c0;
    if (!is_symmetric(a, 1e-12)) {
      throw ProgramError("constraint '" + name + "' is not symmetric");
    }
    if (max_abs(a) > 0.0) c.coeffs[i] = 0.5 * (a + a.transpose());
  }
  const VectorXd yp = probe_point(k);
  const MatrixXd direct = f(layout_.decode(yp));
  if (direct.rows() != c0.rows() || direct.cols() != c0.cols()) {
    throw ProgramError("constraint '" + name + "' changes size");
  }
  const double err = max_abs(direct - c.evaluate(yp));
  if (err > 1e-9 * std::max(scale, max_abs(direct))) {
    throw ProgramError("constraint '" + name + "' is not affine in the decision");
  }
  constraints_.push_back(std::move(c));
}

void FeasibilityProgram::add_multiplier_bounds() {
  const int k = layout_.size();
  for (int idx : {layout_.alpha1_index(), layout_.alpha2_index()}) {
    const std::string tag = idx == layout_.alpha1_index() ? "a1" : "a2";
    AffineConstraint lo{tag + "_nonneg", MatrixXd::Zero(1, 1), {}};
    lo.coeffs.resize(k);
    lo.coeffs[idx] = MatrixXd::Constant(1, 1, 1.0);
    AffineConstraint hi{tag + "_bound", MatrixXd::Constant(1, 1, kMultiplierBound), {}};
    hi.coeffs.resize(k);
    hi.coeffs[idx] = MatrixXd::Constant(1, 1, -1.0);
    constraints_.push_back(std::move(lo));
    constraints_.push_back(std::move(hi));
  }
}

void FeasibilityProgram::set_initial_point(const Decision& d) {
  initial_ = layout_.encode(d);
}

void FeasibilityProgram::validate() const {
  if (constraints_.empty()) throw ProgramError("program has no constraints");
  for (const auto& c : constraints_) {
    if (c.constant.rows() != c.constant.cols() || c.constant.rows() == 0) {
      throw ProgramError("constraint '" + c.name + "' is not square");
    }
    if (static_cast<int>(c.coeffs.size()) != layout_.size()) {
      throw ProgramError("constraint '" + c.name + "' has wrong variable count");
    }
    if (!c.constant.allFinite()) {
      throw ProgramError("constraint '" + c.name + "' has non-finite data");
    }
    for (const auto& a : c.coeffs) {
      if (a.size() == 0) continue;
      if (a.rows() != c.constant.rows() || a.cols() != c.constant.cols() ||
          !a.allFinite()) {
        throw ProgramError("constraint '" + c.name + "' has malformed data");
      }
    }
  }
  if (initial_.size() != layout_.size() || !initial_.allFinite()) {
    throw ProgramError("initial point is malformed");
  }
}

std::shared_ptr<const SdpBackend> make_backend(const std::string& id) {
  if (id.empty() || id == "barrier") return std::make_shared<BarrierBackend>();
  throw ParameterError("unknown SDP backend '" + id + "'");
}

std::shared_ptr<const SdpBackend> backend_from_env() {
  const char* v = std::getenv(kBackendEnvVar);
  return make_backend(v ? std::string(v) : std::string());
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kFeasible: return "feasible";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kSolverFailure: return "solver_failure";
  }
  return "unknown";
}

GainCertificate solve(const FeasibilityProgram& prog, const SdpBackend& backend) {
  prog.validate();
  const MarginResult r = backend.maximize_margin(prog);
  GainCertificate cert;
  cert.backend = backend.id();
  cert.iterations = r.iterations;
  cert.margin = r.margin;
  cert.margin_upper_bound = r.upper_bound;

  const VectorXd y = r.y.size() == prog.layout().size() ? r.y : prog.initial_point();
  const Decision d = prog.layout().decode(y);
  cert.Q = d.Q;
  cert.Lmat = d.Lmat;
  cert.a1 = d.a1;
  cert.a2 = d.a2;
  cert.multiplier_at_bound = std::max(d.a1, d.a2) >= kMultiplierBound * (1.0 - 1e-6);

  double worst = std::numeric_limits<double>::infinity();
  for (const auto& c : prog.constraints()) {
    const double e = min_eigenvalue(c.evaluate(y));
    cert.residuals.push_back({c.name, e});
    worst = std::min(worst, e);
  }
  const double q_min = min_eigenvalue(d.Q);
  cert.residuals.push_back({"Q_spd", q_min});

  using T = MarginResult::Termination;
  const bool have_point = r.y.size() == prog.layout().size() && std::isfinite(r.margin);
  if (r.termination == T::kInfeasibleCertified ||
      (r.termination == T::kConverged && r.upper_bound < kFeasibleMargin)) {
    cert.status = SolveStatus::kInfeasible;
    cert.note = "margin bounded above by " + std::to_string(r.upper_bound);
  } else if (have_point && r.margin >= kFeasibleMargin && q_min > 0.0) {
    if (worst >= kResidualTolerance) {
      cert.status = SolveStatus::kFeasible;
      if (r.termination != T::kConverged) cert.note = "feasible point before convergence";
    } else {
      cert.status = SolveStatus::kSolverFailure;
      cert.note = "residual check failed";
    }
  } else if (r.termination == T::kConverged) {
    cert.status = SolveStatus::kInfeasible;
    cert.note = "optimal margin below tolerance";
  } else {
    cert.status = SolveStatus::kSolverFailure;
    cert.note = r.termination == T::kIterationLimit ? "iteration limit"
                                                     : "numerical failure";
  }
  if (q_min > 0.0) {
    const Eigen::LLT<MatrixXd> llt(cert.Q);
    cert.P = llt.solve(MatrixXd::Identity(cert.Q.rows(), cert.Q.cols()));
    cert.P = 0.5 * (cert.P + cert.P.transpose());
    cert.K = cert.Lmat * cert.P;
  }
  return cert;
}

VerificationReport verify(const GainCertificate& cert, const FeasibilityProgram& prog,
                          double tol) {
  VerificationReport rep;
  rep.tol = tol;
  const DecisionLayout& lay = prog.layout();
  if (cert.Q.rows() != lay.n || cert.Lmat.rows() != lay.m) {
    throw DimensionError("certificate does not match the program");
  }
  const VectorXd y = lay.encode({cert.Q, cert.Lmat, cert.a1, cert.a2});
  bool ok = is_symmetric(cert.Q, 1e-9);
  for (const auto& c : prog.constraints()) {
    const Eigen::SelfAdjointEigenSolver<MatrixXd> es(
        c.evaluate(y), Eigen::EigenvaluesOnly);
    const double e = es.eigenvalues()(0);
    rep.residuals.push_back({c.name, e});
    ok = ok && e >= -tol;
  }
  const Eigen::SelfAdjointEigenSolver<MatrixXd> qs(cert.Q, Eigen::EigenvaluesOnly);
  const double q_min = qs.eigenvalues()(0);
  rep.residuals.push_back({"Q_spd", q_min});
  ok = ok && q_min > 0.0;
  const MatrixXd I = MatrixXd::Identity(lay.n, lay.n);
  if (cert.K.rows() == lay.m && cert.K.cols() == lay.n && cert.P.rows() == lay.n) {
    rep.gain_consistency = max_abs(cert.K * cert.Q - cert.Lmat) /
                           std::max(1.0, max_abs(cert.Lmat));
    rep.inverse_consistency = max_abs(cert.P * cert.Q - I);
    ok = ok && rep.gain_consistency <= 1e-8 && rep.inverse_consistency <= 1e-8;
  } else {
    rep.gain_consistency = rep.inverse_consistency =
        std::numeric_limits<double>::infinity();
    ok = false;
  }
  rep.passed = ok;
  return rep;
}

}  // namespace oddac
