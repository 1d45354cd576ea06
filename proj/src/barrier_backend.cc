#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "oddac/linalg.h"
#include "oddac/sdp.h"

namespace oddac {

namespace {

// One PSD block restricted to the free variables; the margin variable s is
// the last column with coefficient -I.
struct Block {
  MatrixXd constant;
  std::vector<int> vars;       // indices into the free-variable vector
  std::vector<MatrixXd> mats;  // matching coefficients
  int dim() const { return static_cast<int>(constant.rows()); }
};

struct Problem {
  std::vector<Block> blocks;
  int nfree = 0;  // free decision variables (s excluded)
  int total_dim = 0;

  MatrixXd slack(const Block& b, const VectorXd& z) const {
    MatrixXd Z = b.constant;
    for (std::size_t k = 0; k < b.vars.size(); ++k) Z += z(b.vars[k]) * b.mats[k];
    Z.diagonal().array() -= z(nfree);
    return Z;
  }

  // -sum log det(Z_j); +inf outside the domain.
  double barrier(const VectorXd& z) const {
    double acc = 0.0;
    for (const auto& b : blocks) {
      const Eigen::LLT<MatrixXd> llt(slack(b, z));
      if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
      const VectorXd d = llt.matrixLLT().diagonal();
      for (int i = 0; i < d.size(); ++i) {
        if (!(d(i) > 0.0)) return std::numeric_limits<double>::infinity();
        acc -= 2.0 * std::log(d(i));
      }
    }
    return acc;
  }

  double margin(const VectorXd& z) const {
    double s = std::numeric_limits<double>::infinity();
    for (const auto& b : blocks) {
      MatrixXd Z = slack(b, z);
      Z.diagonal().array() += z(nfree);
      s = std::min(s, min_eigenvalue(Z));
    }
    return s;
  }

  // Gradient of t*(-s) + barrier, and a factor W with Hessian = W' W: the
  // whitened coefficients L^{-1} A L^{-T} of every block, stacked.
  bool derivatives(const VectorXd& z, double t, VectorXd& g, MatrixXd& W) const {
    const int nz = nfree + 1;
    g = VectorXd::Zero(nz);
    g(nfree) = -t;
    int rows = 0;
    for (const auto& b : blocks) rows += b.dim() * (b.dim() + 1) / 2;
    W = MatrixXd::Zero(rows, nz);
    int row = 0;
    for (const auto& b : blocks) {
      const int d = b.dim();
      const Eigen::LLT<MatrixXd> llt(slack(b, z));
      if (llt.info() != Eigen::Success) return false;
      const auto L = llt.matrixL();
      const int nv = static_cast<int>(b.vars.size());
      // <X, Y>_F over symmetric matrices through the half-vectorization with
      // off-diagonal entries weighted by sqrt(2).
      auto whiten = [&](const MatrixXd& A, int col) {
        MatrixXd S = L.solve(A);
        S = L.solve(S.transpose()).transpose();
        g(col) -= S.trace();
        int r = row;
        for (int j = 0; j < d; ++j) {
          W(r++, col) += S(j, j);
          for (int i = j + 1; i < d; ++i) W(r++, col) += M_SQRT2 * 0.5 * (S(i, j) + S(j, i));
        }
      };
      for (int k = 0; k < nv; ++k) whiten(b.mats[k], b.vars[k]);
      whiten(-MatrixXd::Identity(d, d), nfree);
      row += d * (d + 1) / 2;
    }
    return g.allFinite() && W.allFinite();
  }
};

}  // namespace

MarginResult BarrierBackend::maximize_margin(const FeasibilityProgram& prog) const {
  using Term = MarginResult::Termination;
  const int k = prog.layout().size();
  MarginResult res;

  // Variables that enter no constraint stay at their initial value.
  std::vector<int> free_index(k, -1);
  std::vector<int> free_vars;
  for (int i = 0; i < k; ++i) {
    for (const auto& c : prog.constraints()) {
      if (c.coeffs[i].size() != 0) {
        free_index[i] = static_cast<int>(free_vars.size());
        free_vars.push_back(i);
        break;
      }
    }
  }
  const VectorXd y0 = prog.initial_point();
  Problem p;
  p.nfree = static_cast<int>(free_vars.size());
  for (const auto& c : prog.constraints()) {
    Block b;
    b.constant = c.constant;
    for (int i = 0; i < k; ++i) {
      if (c.coeffs[i].size() == 0) continue;
      if (free_index[i] < 0) {
        b.constant += y0(i) * c.coeffs[i];
      } else {
        b.vars.push_back(free_index[i]);
        b.mats.push_back(c.coeffs[i]);
      }
    }
    p.total_dim += b.dim();
    p.blocks.push_back(std::move(b));
  }

  auto to_decision = [&](const VectorXd& z) {
    VectorXd y = y0;
    for (int j = 0; j < p.nfree; ++j) y(free_vars[j]) = z(j);
    return y;
  };

  VectorXd z(p.nfree + 1);
  for (int j = 0; j < p.nfree; ++j) z(j) = y0(free_vars[j]);
  z(p.nfree) = 0.0;
  z(p.nfree) = p.margin(z) - 1.0;

  double t = opts_.initial_weight;
  int steps = 0;
  double bound = std::numeric_limits<double>::infinity();  // from the last centered point
  auto finish = [&](Term term) {
    res.y = to_decision(z);
    res.margin = p.margin(z);
    res.iterations = steps;
    res.termination = term;
    res.upper_bound = bound;
    return res;
  };

  while (true) {
    // Newton centering at weight t.
    bool centered = false;
    while (true) {
      if (steps >= opts_.max_newton_steps) return finish(Term::kIterationLimit);
      VectorXd g;
      MatrixXd W;
      if (!p.derivatives(z, t, g, W)) return finish(Term::kNumericalFailure);
      // Column scaling (the multipliers live on a scale up to 1e8 times the
      // other variables), then H^{-1} g through a QR factor of W.
      VectorXd dscale = W.colwise().norm().transpose();
      for (int j = 0; j < dscale.size(); ++j) dscale(j) = dscale(j) > 0.0 ? 1.0 / dscale(j) : 1.0;
      const MatrixXd Ws = W * dscale.asDiagonal();
      const Eigen::ColPivHouseholderQR<MatrixXd> qr(Ws);
      if (qr.rank() < Ws.cols()) return finish(Term::kNumericalFailure);
      const VectorXd gs = dscale.asDiagonal() * g;
      // (R' R) w = P' gs with the column permutation P.
      const auto R = qr.matrixR().topLeftCorner(Ws.cols(), Ws.cols()).template triangularView<Eigen::Upper>();
      VectorXd w = qr.colsPermutation().transpose() * gs;
      R.transpose().solveInPlace(w);
      R.solveInPlace(w);
      const VectorXd dz = -(dscale.asDiagonal() * (qr.colsPermutation() * w));
      const double decrement = -g.dot(dz);
      ++steps;
      if (!std::isfinite(decrement)) return finish(Term::kNumericalFailure);
      if (decrement <= 2.0 * opts_.newton_tolerance) {
        centered = true;
        break;
      }
      // Compare phi through its increment so the large linear term t s does
      // not swamp the barrier's rounding floor.
      const double b0 = p.barrier(z);
      const double floor = 1e-13 * std::max(1.0, std::abs(b0));
      double step = 1.0;
      bool accepted = false;
      for (int h = 0; h < 60 && 0.25 * step * decrement > floor; ++h) {
        const VectorXd zn = z + step * dz;
        const double dphi = -t * step * dz(p.nfree) + (p.barrier(zn) - b0);
        if (std::isfinite(dphi) && dphi <= -0.25 * step * decrement) {
          z = zn;
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) {
        // At the rounding floor a small decrement still counts as centered.
        centered = decrement < 1e-3;
        break;
      }
    }
    if (!centered) {
      // No further progress possible; report what the last centered point
      // established.
      if (bound < -1e-9) return finish(Term::kInfeasibleCertified);
      return finish(Term::kNumericalFailure);
    }
    const double s = z(p.nfree);
    const double gap = p.total_dim / t;
    bound = s + gap;
    if (bound < -1e-9) return finish(Term::kInfeasibleCertified);
    if (gap <= opts_.gap_tolerance) return finish(Term::kConverged);
    // The sign is settled and the margin known to a relative 1e-6.
    if (s >= 0.0 && gap <= opts_.relative_gap * std::max(1.0, s)) {
      return finish(Term::kConverged);
    }
    t *= opts_.weight_growth;
  }
}

}  // namespace oddac
