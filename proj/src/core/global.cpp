#include "hcx/global.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hcx/error.hpp"

namespace hcx {

namespace {

struct Bracket {
  double lo, hi;
};

// gap(mu) = phi(mu) - psi(mu) is strictly decreasing on (-lambda_1, inf).
double gap(const Spectrum& s, const TrslInstance& inst, double mu) { return phi(s, mu) - psi_trsl(inst, mu); }

double bisect_decreasing(const Spectrum& s, const TrslInstance& inst, Bracket br) {
  double mid = 0.5 * (br.lo + br.hi);
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (br.lo + br.hi);
    if (mid <= br.lo || mid >= br.hi) break;  // bracket exhausted in floating point
    const double p = psi_trsl(inst, mid);
    const double v = phi(s, mid) - p;
    if (std::abs(v) <= 1e-10 * std::max(1.0, std::abs(p))) return mid;
    if (v > 0.0)
      br.lo = mid;
    else
      br.hi = mid;
  }
  return mid;
}

// Upper end of the bracket: first mu = -lambda_1 + step * 2^k with gap < 0.
double expand_right(const Spectrum& s, const TrslInstance& inst, double from) {
  double step = std::max(1.0, std::abs(from));
  for (int k = 0; k < 200; ++k) {
    const double mu = from + step;
    if (gap(s, inst, mu) < 0.0) return mu;
    step *= 2.0;
  }
  throw Error(ErrorCode::NoPreimage, "could not bracket the secular root from above");
}

GlobalSolution finish(const TrslInstance& inst, double mu, Vec x, bool hard) {
  GlobalSolution out;
  out.mu = mu;
  out.x = std::move(x);
  out.y = Vec::Constant(1, inst.f0.inv_d1(0.5 * inst.a * mu));
  out.hard_case = hard;
  out.objective = trsl_objective(inst, out.x, out.y(0));
  return out;
}

}  // namespace

double trsl_objective(const TrslInstance& inst, const Vec& x, double y) {
  return 0.5 * x.dot(inst.H * x) + inst.c.dot(x) + inst.f0.eval(y);
}

GlobalSolution solve_global(const TrslInstance& inst) {
  inst.validate();
  const Spectrum s = decompose(inst.H, inst.c);
  const double l1 = s.lambda1();
  if (l1 >= 0.0) {
    std::ostringstream os;
    os << "lambda_1 = " << l1 << " >= 0; the problem is convex";
    throw Error(ErrorCode::ConvexInstance, os.str());
  }
  const double mu_min = -l1;

  if (s.g1_zero()) {
    // phi has no pole at -lambda_1; x_hat is the minimum-norm stationary point
    const double target = psi_trsl(inst, mu_min);
    Vec w = Vec::Zero(s.n());
    const double gap_tol = tol::eigengap * std::max(1.0, std::abs(l1));
    for (int i = 0; i < s.n(); ++i) {
      if (s.lambdas(i) - l1 <= gap_tol || !s.active(i)) continue;
      w(i) = -s.g(i) / (s.lambdas(i) + mu_min);
    }
    const double xhat2 = w.squaredNorm();
    if (xhat2 <= target) {
      Vec v1 = s.eigvecs.col(0);
      if (inst.c.dot(v1) > 0.0) v1 = -v1;
      const double tau = std::sqrt(std::max(0.0, target - xhat2));
      return finish(inst, mu_min, s.eigvecs * w + tau * v1, true);
    }
    const double hi = expand_right(s, inst, mu_min);
    const double mu = bisect_decreasing(s, inst, {mu_min, hi});
    return finish(inst, mu, x_of_mu(s, mu), true);
  }

  // easy case: phi -> inf as mu -> -lambda_1 from the right
  double delta = 1e-3 * std::max(1.0, std::abs(l1));
  double lo = mu_min + delta;
  while (gap(s, inst, lo) <= 0.0) {
    delta *= 0.1;
    if (delta < 2.0 * tol::pole) {
      // the root sits inside the pole tolerance; report the closest admissible point
      lo = mu_min + 2.0 * tol::pole;
      return finish(inst, lo, x_of_mu(s, lo), false);
    }
    lo = mu_min + delta;
  }
  const double hi = expand_right(s, inst, lo);
  const double mu = bisect_decreasing(s, inst, {lo, hi});
  return finish(inst, mu, x_of_mu(s, mu), false);
}

GeneralProblem as_general(const TrslInstance& inst) {
  const TrscInstance t = as_trsc(inst);
  GeneralProblem p;
  p.H = inst.H;
  p.c = inst.c;
  p.f0 = t.f0;
  p.constraints.push_back(t.f);
  return p;
}

const char* to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::StationarityX: return "StationarityX";
    case ViolationKind::StationarityY: return "StationarityY";
    case ViolationKind::ActiveCoupling: return "ActiveCoupling";
    case ViolationKind::Complementarity: return "Complementarity";
    case ViolationKind::Infeasible: return "Infeasible";
    case ViolationKind::NegativeMultiplier: return "NegativeMultiplier";
    case ViolationKind::NotPsd: return "NotPsd";
  }
  return "Unknown";
}

bool GlobalCheck::violates(ViolationKind kind) const {
  return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) { return v.kind == kind; });
}

GlobalCheck check_global_certificate(const GeneralProblem& prob, const Vec& x, const Vec& y, const Vec& mus) {
  const auto n = prob.c.size();
  const std::size_t k = prob.constraints.size();
  if (k == 0 || prob.H.rows() != n || prob.H.cols() != n || x.size() != n ||
      mus.size() != static_cast<Eigen::Index>(k))
    throw Error(ErrorCode::DimensionMismatch, "certificate data dimensions disagree");

  GlobalCheck out;
  auto flag = [&](ViolationKind kind, int index, double value, double tolv) {
    if (!(value <= tolv)) out.violations.push_back({kind, index, value, tolv});
  };

  for (std::size_t j = 0; j < k; ++j) flag(ViolationKind::NegativeMultiplier, int(j + 1), -mus(j), 0.0);

  const double mu1 = mus(0);
  const Vec rx = prob.H * x + mu1 * x + prob.c;
  flag(ViolationKind::StationarityX, 1, rx.norm(), 1e-8 * (1.0 + prob.c.norm()));

  const Vec g0 = prob.f0.gradient(y);
  Vec ry = g0 + 0.5 * mu1 * prob.constraints[0].gradient(y);
  for (std::size_t j = 1; j < k; ++j) ry += mus(j) * prob.constraints[j].gradient(y);
  flag(ViolationKind::StationarityY, 1, ry.norm(), 1e-8 * (1.0 + g0.norm()));

  const double coupling = x.squaredNorm() + prob.constraints[0].value(y);
  flag(ViolationKind::ActiveCoupling, 1, std::abs(coupling), 1e-8 * (1.0 + x.squaredNorm()));

  for (std::size_t j = 1; j < k; ++j) {
    const double fj = prob.constraints[j].value(y);
    flag(ViolationKind::Infeasible, int(j + 1), fj, 1e-8);
    flag(ViolationKind::Complementarity, int(j + 1), std::abs(mus(j) * fj), 1e-8 * (1.0 + mus(j)));
  }

  Eigen::SelfAdjointEigenSolver<Mat> es(prob.H, Eigen::EigenvaluesOnly);
  const double l1 = es.eigenvalues()(0);
  out.min_eig = l1 + mu1;
  flag(ViolationKind::NotPsd, 1, -out.min_eig, 1e-9 * (1.0 + std::abs(l1)));

  out.valid = out.violations.empty();
  return out;
}

}  // namespace hcx
