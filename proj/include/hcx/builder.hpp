#pragma once

#include <optional>
#include <vector>

#include "hcx/convex.hpp"

namespace hcx {

struct Line {
  double slope = 0.0;
  double intercept = 0.0;

  double operator()(double mu) const { return slope * mu + intercept; }
};

/// max{L_1, ..., L_d} with the corner at each centers[j] (the intersection of
/// L_j and L_{j+1}) replaced by the quadratic tangent to both lines at
/// centers[j] -/+ eps. Throws BadSequence if the lines do not meet at the
/// centers, slopes do not increase, or the blends overlap.
PiecewisePsi assemble_psi(const std::vector<Line>& lines, const std::vector<double>& centers, double eps);

struct BuildOptions {
  // replaces the computed intersections; L_{j+1} is then re-anchored so that it
  // still meets L_j at o_j and passes through (mu_{2j+2}, phi(mu_{2j+2}))
  std::vector<double> o_overrides;
  std::optional<double> eps_override;
};

struct BuiltPsi {
  PiecewisePsi psi;
  std::vector<Line> lines;
  std::vector<double> centers;
  double eps = 0.0;
  int eps_halvings = 0;  // blends shrunk so that phi - psi keeps its sign on them
};

/// Piecewise psi crossing phi at every mu_i, with phi' > psi' at the even ones.
/// mus holds 2d ascending points inside (max{0, -lambda_2}, -lambda_1).
/// Throws BadSequence, or PhiNotIncreasing when phi'(mu_1) < 0.
BuiltPsi build_psi(const Spectrum& s, const std::vector<double>& mus, const BuildOptions& opts = {});

/// f0 with f0' = psi^{-1}/2. Only a = 1, b = 0 is supported.
ConvexScalar psi_to_f0(const PiecewisePsi& psi, double a = 1.0, double b = 0.0);

/// The d = 3 psi behind CannedExample::Example2d3: lines
/// mu/4 - 1/4, 11/5 mu - 383/50, 53/5 mu - 2189/50 blended on [3.7, 3.9], [4.2, 4.4].
PiecewisePsi example2_displayed_psi();

enum class CannedExample { Example1, Example2d3 };

/// H = diag(-5, -1), c = (1, 1), a = 1, b = 0 with the quartic f0 (Example1)
/// or the f0 integrated from example2_displayed_psi (Example2d3).
TrslInstance canned_example(CannedExample which);

/// base with f0 replaced by psi_to_f0(build_psi(...)); a and b are reset to 1, 0.
TrslInstance build_instance(const TrslInstance& base, const std::vector<double>& mus, const BuildOptions& opts = {});

}  // namespace hcx
