#pragma once

#include <string>
#include <vector>

#include "hcx/convex.hpp"

namespace hcx {

struct GlobalSolution {
  Vec x;
  Vec y;
  double mu = 0.0;  // multiplier of the coupling constraint
  bool hard_case = false;
  double objective = 0.0;
};

/// Global minimizer of a TRS-L instance through the secular equation
/// phi(mu) = psi(mu) on [-lambda_1, inf).
///
/// Easy case (g has weight on the lambda_1 eigenspace): bisection on the unique
/// root in (-lambda_1, inf). Hard case: mu = -lambda_1 with the eigenvector ray
/// completing |x|^2 = psi(-lambda_1), unless the pole-free phi still exceeds
/// psi there, in which case the root lies to the right and bisection resumes.
/// Throws ConvexInstance when lambda_1 >= 0.
GlobalSolution solve_global(const TrslInstance& inst);

/// General TRS-C data with k >= 1 convex constraints on y; constraints[0] is
/// the coupled one (x'x + f_1(y) <= 0), the others read f_j(y) <= 0.
struct GeneralProblem {
  Mat H;
  Vec c;
  VectorFunction f0;
  std::vector<VectorFunction> constraints;
};

GeneralProblem as_general(const TrslInstance& inst);

enum class ViolationKind {
  StationarityX,      // (H + mu_1 I) x + c = 0
  StationarityY,      // grad f0 + mu_1/2 grad f_1 + sum mu_j grad f_j = 0
  ActiveCoupling,     // x'x + f_1(y) = 0
  Complementarity,    // mu_j f_j(y) = 0, j >= 2
  Infeasible,         // f_j(y) <= 0, j >= 2
  NegativeMultiplier, // mu_j >= 0
  NotPsd,             // H + mu_1 I >= 0
};

const char* to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  int index = 0;  // constraint index (1-based) where it applies
  double value = 0.0;
  double tolerance = 0.0;
};

struct GlobalCheck {
  bool valid = false;
  std::vector<Violation> violations;
  double min_eig = 0.0;  // of H + mu_1 I
  // a Slater point cannot be verified for oracle constraints
  bool slater_unchecked = true;

  bool violates(ViolationKind kind) const;
};

/// Checks the global optimality certificate; valid implies global minimality.
GlobalCheck check_global_certificate(const GeneralProblem& prob, const Vec& x, const Vec& y, const Vec& mus);

double trsl_objective(const TrslInstance& inst, const Vec& x, double y);

}  // namespace hcx
