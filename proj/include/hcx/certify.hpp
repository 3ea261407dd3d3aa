#pragma once

#include <optional>
#include <string>

#include "hcx/convex.hpp"
#include "hcx/global.hpp"

namespace hcx {

/// Classification of a secular root by the sign of phi'(mu) - psi'(mu).
enum class RootClass { StrictLocal, RejectedNecessary, Indeterminate };
const char* to_string(RootClass c);

struct KktResiduals {
  double stationarity_x = 0.0;  // |(H + mu I) x + c|
  double stationarity_y = 0.0;  // |grad f0 + mu/2 grad f|
  double coupling = 0.0;        // |x'x + f(y)|
  bool ok = false;
};

KktResiduals kkt_residuals(const Problem& prob, const Vec& x, const Vec& y, double mu);

struct CandidatePoint {
  Vec x;
  Vec y;
  double mu = 0.0;
  KktResiduals residuals;
  RootClass tag = RootClass::Indeterminate;
};

/// Basis of the tangent hyperplane x'(mu) s + 1/2 grad_f' t = 0, as an
/// (n+m) x (n+m-1) matrix. Throws DegenerateG1 when g_1 vanishes.
Mat build_W(const Spectrum& s, double mu, const Vec& grad_f);

struct ReducedHessian {
  double mu = 0.0;
  Mat B;           // W' diag(H + mu I, hess_term) W
  Mat B_rank_one;  // the same matrix assembled as diag part + sigma u u'
  double min_eig = 0.0;
  double det_direct = 0.0;
  double det_formula = 0.0;
  double phi_d1 = 0.0;
  double curvature = 0.0;  // 1/2 grad_f' hess_term^{-1} grad_f
};

/// Throws NotPositiveDefinite when hess_term is not SPD.
ReducedHessian build_B(const Spectrum& s, double mu, const Vec& grad_f, const Mat& hess_term);

enum class CertificateKind { GlobalMin, StrictLocalNonGlobal, NotLocalMin, Indeterminate };
const char* to_string(CertificateKind k);

struct Certificate {
  CertificateKind kind = CertificateKind::Indeterminate;
  std::string reason;
  KktResiduals kkt;
  std::optional<ReducedHessian> hessian;
  std::optional<GlobalCheck> global;
};

/// Single-constraint TRS-C data as a general problem for the global checker.
GeneralProblem as_general(const Problem& prob);

/// KKT residuals, then x = 0 / mu >= -lambda_1 routes to the global check,
/// the local-non-global necessary conditions on mu and the spectrum, and
/// finally the sign of the reduced Hessian.
Certificate certify_local(const Problem& prob, const CandidatePoint& cand);

}  // namespace hcx
