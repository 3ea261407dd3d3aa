#pragma once

#include <Eigen/Dense>

namespace hcx {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

namespace tol {
// |H - H^T| (max entry, relative to max(1, |H|_max))
inline constexpr double symmetry = 1e-9;
// |lambda_i - lambda_1| <= eigengap * max(1, |lambda_1|) counts as a tie
inline constexpr double eigengap = 1e-9;
// |g_i| <= zero_coefficient * |c| removes the term (and its pole) from phi
inline constexpr double zero_coefficient = 1e-12;
// absolute distance from an active pole at which evaluation is refused
inline constexpr double pole = 1e-8;
}  // namespace tol

/// Eigendecomposition of H with the linear term rotated into the eigenbasis.
///
/// Eigenvectors are sign-normalized so that the entry of largest magnitude in
/// each column is positive; every secular quantity depends on g only through
/// g_i^2, so the choice is cosmetic except for making output reproducible.
struct Spectrum {
  Vec lambdas;  // ascending
  Mat eigvecs;  // columns v_i
  Vec g;        // V^T c
  int lambda1_multiplicity = 1;
  double g1_block_norm = 0.0;
  double zero_threshold = 0.0;  // tol::zero_coefficient * |c|

  int n() const { return static_cast<int>(lambdas.size()); }
  double lambda1() const { return lambdas(0); }
  // lambda_2, or +inf when n == 1
  double lambda2() const;
  bool active(int i) const { return std::abs(g(i)) > zero_threshold; }
  bool g1_zero() const { return g1_block_norm <= zero_threshold; }

  /// V diag(lambdas) V^T
  Mat reconstruct() const;
};

Spectrum decompose(const Mat& H, const Vec& c);

/// phi(mu) = sum g_i^2 / (lambda_i + mu)^2 over active terms.
double phi(const Spectrum& s, double mu);
double phi_d1(const Spectrum& s, double mu);
double phi_d2(const Spectrum& s, double mu);

/// x(mu) = -(H + mu I)^{-1} c, assembled in the eigenbasis.
Vec x_of_mu(const Spectrum& s, double mu);

}  // namespace hcx
