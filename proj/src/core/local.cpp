#include "hcx/local.hpp"

#include <algorithm>
#include <cmath>

#include "hcx/error.hpp"

namespace hcx {

const char* to_string(PrecheckReason r) {
  switch (r) {
    case PrecheckReason::None: return "none";
    case PrecheckReason::Convex: return "convex";
    case PrecheckReason::RepeatedLambda1: return "repeated-lambda1";
    case PrecheckReason::G1Zero: return "g1=0";
    case PrecheckReason::EmptyInterval: return "empty-interval";
    case PrecheckReason::EmptyFeasibleSet: return "empty-feasible-set";
  }
  return "unknown";
}

const char* to_string(UniquenessKind k) {
  switch (k) {
    case UniquenessKind::AtMostOneProven: return "AtMostOne(Proven)";
    case UniquenessKind::AtMostOneSampled: return "AtMostOne(Sampled)";
    case UniquenessKind::MultiplePossible: return "MultiplePossible";
  }
  return "Unknown";
}

Precheck precheck(const Problem& prob) {
  const Spectrum& s = prob.spectrum();
  Precheck pc;
  pc.lo = std::max(0.0, -s.lambda2());
  pc.hi = -s.lambda1();
  auto stop = [&](PrecheckReason r) {
    pc.proceed = false;
    pc.reason = r;
    return pc;
  };
  if (s.lambda1() >= 0.0) return stop(PrecheckReason::Convex);
  if (auto cf = prob.inner().constant_f(); cf && *cf >= 0.0) return stop(PrecheckReason::EmptyFeasibleSet);
  if (s.lambda1_multiplicity > 1) return stop(PrecheckReason::RepeatedLambda1);
  if (s.g1_zero()) return stop(PrecheckReason::G1Zero);
  if (pc.hi - pc.lo <= local_defaults::left_margin + local_defaults::right_margin)
    return stop(PrecheckReason::EmptyInterval);
  pc.proceed = true;
  return pc;
}

RootClass classify(double gap_d1, double phi_d1) {
  const double tolc = 1e-7 * (1.0 + std::abs(phi_d1));
  if (gap_d1 > tolc) return RootClass::StrictLocal;
  if (gap_d1 < -tolc) return RootClass::RejectedNecessary;
  return RootClass::Indeterminate;
}

namespace {

struct Sample {
  double mu = 0.0;
  double phi = 0.0;
  double phi_d1 = 0.0;
  double gap = 0.0;     // phi - psi
  double gap_d1 = 0.0;  // phi' - psi'
  Vec y;
};

class GapFunction {
 public:
  explicit GapFunction(const Problem& prob) : prob_(prob) {}

  Sample at(double mu, const Vec* warm) const {
    const InnerPoint ip = prob_.inner().solve(mu, warm);
    Sample smp;
    smp.mu = mu;
    smp.phi = phi(prob_.spectrum(), mu);
    smp.phi_d1 = phi_d1(prob_.spectrum(), mu);
    smp.gap = smp.phi - ip.psi;
    smp.gap_d1 = smp.phi_d1 - ip.psi_d1;
    smp.y = ip.y;
    return smp;
  }

 private:
  const Problem& prob_;
};

int sign(double v) { return (v > 0.0) - (v < 0.0); }

// Bisection on the sign of `field` (gap or gap_d1) between two samples of opposite sign.
// Width 0 runs down to adjacent doubles; roots near a pole need it.
template <class Field>
std::pair<Sample, Sample> bisect(const GapFunction& fn, Sample lo, Sample hi, double width, Field field) {
  const int slo = sign(field(lo));
  for (int it = 0; it < 200 && hi.mu - lo.mu > width; ++it) {
    const double mid = 0.5 * (lo.mu + hi.mu);
    if (mid <= lo.mu || mid >= hi.mu) break;
    Sample s = fn.at(mid, &lo.y);
    const int sm = sign(field(s));
    if (sm == 0) return {s, s};
    if (sm == slo)
      lo = std::move(s);
    else
      hi = std::move(s);
  }
  return {lo, hi};
}

RootRecord make_record(const GapFunction& fn, const Sample& lo, const Sample& hi) {
  // report the end of the final bracket with the smaller residual
  const Sample& best = std::abs(lo.gap) <= std::abs(hi.gap) ? lo : hi;
  Sample at = best;
  if (lo.mu != hi.mu) at = fn.at(0.5 * (lo.mu + hi.mu), &lo.y);
  if (std::abs(best.gap) < std::abs(at.gap)) at = best;
  RootRecord r;
  r.mu = at.mu;
  r.residual = at.gap;
  r.gap_d1 = at.gap_d1;
  r.lo = lo.mu;
  r.hi = hi.mu;
  r.classification = classify(at.gap_d1, at.phi_d1);
  return r;
}

}  // namespace

std::vector<RootRecord> enumerate_roots(const Problem& prob, int grid_points) {
  const Precheck pc = precheck(prob);
  if (!pc.proceed) return {};

  const double a = pc.lo + local_defaults::left_margin;
  const double b = pc.hi - local_defaults::right_margin;
  const int N = std::max(grid_points, 2);
  const double width = 1e-12 * (pc.hi - pc.lo);
  const GapFunction fn(prob);

  std::vector<Sample> grid;
  grid.reserve(N);
  for (int k = 0; k < N; ++k) {
    const double mu = k + 1 == N ? b : a + (b - a) * k / (N - 1);
    grid.push_back(fn.at(mu, grid.empty() ? nullptr : &grid.back().y));
  }

  auto gap = [](const Sample& s) { return s.gap; };
  auto gap_d1 = [](const Sample& s) { return s.gap_d1; };

  std::vector<RootRecord> roots;
  auto push = [&](RootRecord r) {
    if (!roots.empty() && std::abs(r.mu - roots.back().mu) <= 2.0 * width) return;
    roots.push_back(r);
  };

  for (int k = 0; k < N; ++k) {
    const Sample& s0 = grid[k];
    if (s0.gap == 0.0) {
      push(make_record(fn, s0, s0));
      continue;
    }
    if (k + 1 == N) break;
    const Sample& s1 = grid[k + 1];
    if (sign(s0.gap) * sign(s1.gap) < 0) {
      auto [lo, hi] = bisect(fn, s0, s1, 0.0, gap);
      push(make_record(fn, lo, hi));
      continue;
    }
    if (s1.gap == 0.0 || sign(s0.gap_d1) * sign(s1.gap_d1) >= 0) continue;

    // phi - psi keeps its sign across the cell but turns: either a tangency or
    // a pair of crossings hidden inside the cell
    auto [clo, chi] = bisect(fn, s0, s1, width, gap_d1);
    const Sample crit = fn.at(0.5 * (clo.mu + chi.mu), &clo.y);
    if (sign(crit.gap) != sign(s0.gap)) {
      if (crit.gap == 0.0) {
        RootRecord r = make_record(fn, crit, crit);
        r.tangential = true;
        r.classification = RootClass::Indeterminate;
        push(r);
        continue;
      }
      auto [l1, h1] = bisect(fn, s0, crit, 0.0, gap);
      push(make_record(fn, l1, h1));
      auto [l2, h2] = bisect(fn, crit, s1, 0.0, gap);
      push(make_record(fn, l2, h2));
    } else if (std::abs(crit.gap) <= 1e-8 * std::max(1.0, crit.phi)) {
      RootRecord r = make_record(fn, crit, crit);
      r.lo = clo.mu;
      r.hi = chi.mu;
      r.tangential = true;
      r.classification = RootClass::Indeterminate;
      push(r);
    }
  }
  return roots;
}

CandidatePoint materialize(const Problem& prob, const RootRecord& root) {
  CandidatePoint cp;
  cp.mu = root.mu;
  cp.x = x_of_mu(prob.spectrum(), root.mu);
  cp.y = prob.inner().solve(root.mu, nullptr).y;
  cp.residuals = kkt_residuals(prob, cp.x, cp.y, cp.mu);
  cp.tag = root.classification;
  return cp;
}

UniquenessReport uniqueness_report(const TrslInstance& inst, int samples) {
  UniquenessReport rep;
  const Problem prob = Problem::from(inst);
  const Precheck pc = precheck(prob);
  if (!pc.proceed) {
    // nothing to enumerate: zero local non-global minimizers
    rep.kind = UniquenessKind::AtMostOneProven;
    rep.exact_classification = true;
    return rep;
  }
  try {
    const LogConcavity lc = log_concavity_holds(inst, pc.lo + local_defaults::left_margin,
                                                pc.hi - local_defaults::right_margin, samples);
    switch (lc.verdict) {
      case LogConcavityVerdict::Proven:
        rep.kind = UniquenessKind::AtMostOneProven;
        rep.exact_classification = true;
        break;
      case LogConcavityVerdict::SampledTrue:
        rep.kind = UniquenessKind::AtMostOneSampled;
        break;
      case LogConcavityVerdict::FalsifiedAt:
        rep.kind = UniquenessKind::MultiplePossible;
        rep.witness_mu = lc.mu;
        break;
    }
  } catch (const Error&) {
    rep.kind = UniquenessKind::MultiplePossible;
  }
  return rep;
}

}  // namespace hcx
