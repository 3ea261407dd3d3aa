#pragma once

#include <vector>

#include "hcx/certify.hpp"
#include "hcx/convex.hpp"

namespace hcx {

enum class PrecheckReason {
  None,
  Convex,            // lambda_1 >= 0
  RepeatedLambda1,   // lambda_1 not simple
  G1Zero,            // c orthogonal to the lambda_1 eigenvector
  EmptyInterval,     // (max{0, -lambda_2}, -lambda_1) narrower than the pole margins
  EmptyFeasibleSet,  // constant f >= 0, so {y : f(y) < 0} is empty
};
const char* to_string(PrecheckReason r);

struct Precheck {
  bool proceed = false;
  PrecheckReason reason = PrecheckReason::None;
  double lo = 0.0;  // open interval (lo, hi) that can hold local non-global multipliers
  double hi = 0.0;
};

/// Cheap dichotomies under which no local non-global minimizer exists.
Precheck precheck(const Problem& prob);

struct RootRecord {
  double mu = 0.0;
  double residual = 0.0;  // phi(mu) - psi(mu)
  double gap_d1 = 0.0;    // phi'(mu) - psi'(mu)
  double lo = 0.0;        // final bracket
  double hi = 0.0;
  RootClass classification = RootClass::Indeterminate;
  bool tangential = false;
};

namespace local_defaults {
inline constexpr int grid_points = 4096;
inline constexpr double left_margin = 2.0 * tol::pole;  // just outside the evaluation guard
inline constexpr double right_margin = 1e-6;
}  // namespace local_defaults

/// Every root of phi - psi on the precheck interval, classified by the sign
/// of phi' - psi'. Empty when the precheck fails.
std::vector<RootRecord> enumerate_roots(const Problem& prob, int grid_points = local_defaults::grid_points);

RootClass classify(double gap_d1, double phi_d1);

/// x(mu), y(mu) at a root, with KKT residuals attached.
CandidatePoint materialize(const Problem& prob, const RootRecord& root);

enum class UniquenessKind { AtMostOneProven, AtMostOneSampled, MultiplePossible };
const char* to_string(UniquenessKind k);

struct UniquenessReport {
  UniquenessKind kind = UniquenessKind::MultiplePossible;
  // classification by phi' - psi' > 0 is necessary and sufficient
  bool exact_classification = false;
  double witness_mu = 0.0;  // where log-concavity failed, if it did
};

UniquenessReport uniqueness_report(const TrslInstance& inst, int samples = 512);

}  // namespace hcx
