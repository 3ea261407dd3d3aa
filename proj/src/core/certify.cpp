#include "hcx/certify.hpp"

#include <cmath>
#include <sstream>

#include "hcx/error.hpp"

namespace hcx {

const char* to_string(RootClass c) {
  switch (c) {
    case RootClass::StrictLocal: return "StrictLocal";
    case RootClass::RejectedNecessary: return "RejectedNecessary";
    case RootClass::Indeterminate: return "Indeterminate";
  }
  return "Unknown";
}

const char* to_string(CertificateKind k) {
  switch (k) {
    case CertificateKind::GlobalMin: return "GlobalMin";
    case CertificateKind::StrictLocalNonGlobal: return "StrictLocalNonGlobal";
    case CertificateKind::NotLocalMin: return "NotLocalMin";
    case CertificateKind::Indeterminate: return "Indeterminate";
  }
  return "Unknown";
}

namespace {

// g with sub-threshold entries removed, matching what phi and x_of_mu see.
Vec effective_g(const Spectrum& s) {
  Vec g = s.g;
  for (int i = 0; i < s.n(); ++i)
    if (!s.active(i)) g(i) = 0.0;
  return g;
}

}  // namespace

KktResiduals kkt_residuals(const Problem& prob, const Vec& x, const Vec& y, double mu) {
  KktResiduals r;
  r.stationarity_x = (prob.H() * x + mu * x + prob.c()).norm();
  const Vec g0 = prob.inner().grad_f0(y);
  r.stationarity_y = (g0 + 0.5 * mu * prob.inner().grad_f(y)).norm();
  r.coupling = std::abs(prob.constraint(x, y));
  r.ok = mu >= 0.0 && r.stationarity_x <= 1e-8 * (1.0 + prob.c().norm()) &&
         r.stationarity_y <= 1e-8 * (1.0 + g0.norm()) && r.coupling <= 1e-8 * (1.0 + x.squaredNorm());
  return r;
}

Mat build_W(const Spectrum& s, double mu, const Vec& grad_f) {
  if (!s.active(0)) throw Error(ErrorCode::DegenerateG1, "g_1 is below the zero-coefficient threshold");
  const int n = s.n();
  const int m = static_cast<int>(grad_f.size());
  const Vec g = effective_g(s);
  const double diag = -g(0) / (s.lambdas(0) + mu);

  Mat M = Mat::Zero(n + m, n + m - 1);
  for (int i = 1; i < n; ++i) M(0, i - 1) = g(i) / (s.lambdas(i) + mu);
  for (int j = 0; j < m; ++j) M(0, n - 1 + j) = -0.5 * grad_f(j);
  for (int r = 1; r < n + m; ++r) M(r, r - 1) = diag;

  Mat rot = Mat::Identity(n + m, n + m);
  rot.topLeftCorner(n, n) = s.eigvecs;
  return rot * M;
}

ReducedHessian build_B(const Spectrum& s, double mu, const Vec& grad_f, const Mat& hess_term) {
  const int n = s.n();
  const int m = static_cast<int>(grad_f.size());
  if (hess_term.rows() != m || hess_term.cols() != m)
    throw Error(ErrorCode::DimensionMismatch, "hess_term must be m x m");
  Eigen::LLT<Mat> llt(hess_term);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorCode::NotPositiveDefinite, "hess f0 + mu/2 hess f is not positive definite");

  ReducedHessian out;
  out.mu = mu;
  const Mat W = build_W(s, mu, grad_f);
  Mat G = Mat::Zero(n + m, n + m);
  G.topLeftCorner(n, n) = s.reconstruct() + mu * Mat::Identity(n, n);
  G.bottomRightCorner(m, m) = hess_term;
  out.B = W.transpose() * G * W;
  out.B = 0.5 * (out.B + out.B.transpose());

  const Vec g = effective_g(s);
  const double g1 = g(0);
  const double sigma = s.lambdas(0) + mu;
  Mat Bbar = Mat::Zero(n + m - 1, n + m - 1);
  Vec ubar(n + m - 1);
  double det_bar = 1.0;
  for (int i = 1; i < n; ++i) {
    const double d = g1 * g1 * (s.lambdas(i) + mu) / (sigma * sigma);
    Bbar(i - 1, i - 1) = d;
    det_bar *= d;
    ubar(i - 1) = g(i) / (s.lambdas(i) + mu);
  }
  const double scale = (g1 / sigma) * (g1 / sigma);
  Bbar.bottomRightCorner(m, m) = scale * hess_term;
  ubar.tail(m) = -0.5 * grad_f;
  det_bar *= std::pow(scale, m) * llt.matrixL().determinant() * llt.matrixL().determinant();
  out.B_rank_one = Bbar + sigma * ubar * ubar.transpose();

  out.phi_d1 = phi_d1(s, mu);
  out.curvature = 0.5 * grad_f.dot(llt.solve(grad_f));
  out.det_direct = out.B.determinant();
  out.det_formula = -(sigma * sigma * sigma) / (2.0 * g1 * g1) * det_bar * (out.phi_d1 - out.curvature);

  Eigen::SelfAdjointEigenSolver<Mat> es(out.B, Eigen::EigenvaluesOnly);
  out.min_eig = es.eigenvalues()(0);
  return out;
}

GeneralProblem as_general(const Problem& prob) {
  GeneralProblem gp;
  gp.H = prob.H();
  gp.c = prob.c();
  const InnerModel* inner = &prob.inner();
  gp.f0.value = [inner](const Vec& y) { return inner->f0(y); };
  gp.f0.gradient = [inner](const Vec& y) { return inner->grad_f0(y); };
  VectorFunction f;
  f.value = [inner](const Vec& y) { return inner->f(y); };
  f.gradient = [inner](const Vec& y) { return inner->grad_f(y); };
  gp.constraints.push_back(std::move(f));
  return gp;
}

Certificate certify_local(const Problem& prob, const CandidatePoint& cand) {
  const Spectrum& s = prob.spectrum();
  if (cand.x.size() != prob.n() || cand.y.size() != prob.inner().m())
    throw Error(ErrorCode::DimensionMismatch, "candidate dimensions disagree with the instance");

  Certificate cert;
  cert.kkt = kkt_residuals(prob, cand.x, cand.y, cand.mu);
  if (!cert.kkt.ok) {
    cert.kind = CertificateKind::Indeterminate;
    cert.reason = "not a KKT point for the supplied multiplier";
    return cert;
  }

  const double l1 = s.lambda1();
  auto global_route = [&](const char* why) {
    cert.global = check_global_certificate(as_general(prob), cand.x, cand.y, Vec::Constant(1, cand.mu));
    if (cert.global->valid) {
      cert.kind = CertificateKind::GlobalMin;
      cert.reason = why;
    } else {
      cert.kind = CertificateKind::NotLocalMin;
      cert.reason = std::string(why) + "; global certificate fails";
    }
    return cert;
  };

  // a local minimizer with x = 0 is global, so only the global certificate can apply
  if (cand.x.norm() <= 1e-12 * (1.0 + prob.c().norm())) return global_route("x = 0");
  if (cand.mu >= -l1 - 1e-9 * (1.0 + std::abs(l1))) return global_route("mu >= -lambda_1");

  const double lo = std::max(0.0, -s.lambda2());
  std::ostringstream why;
  if (s.lambda1_multiplicity > 1) {
    why << "lambda_1 is not simple";
  } else if (s.g1_zero()) {
    why << "c is orthogonal to the lambda_1 eigenvector";
  } else if (!(cand.mu > lo && cand.mu < -l1)) {
    why << "mu=" << cand.mu << " outside (" << lo << ", " << -l1 << ")";
  }
  if (!why.str().empty()) {
    cert.kind = CertificateKind::NotLocalMin;
    cert.reason = why.str();
    return cert;
  }

  cert.hessian = build_B(s, cand.mu, prob.inner().grad_f(cand.y), prob.inner().hess_term(cand.y, cand.mu));
  Eigen::SelfAdjointEigenSolver<Mat> es(cert.hessian->B, Eigen::EigenvaluesOnly);
  const double norm = es.eigenvalues().cwiseAbs().maxCoeff();
  const double thr = 1e-9 * (1.0 + norm);
  const double min_eig = cert.hessian->min_eig;
  if (min_eig >= thr) {
    cert.kind = CertificateKind::StrictLocalNonGlobal;
    cert.reason = "reduced Hessian positive definite";
  } else if (min_eig <= -thr) {
    cert.kind = CertificateKind::NotLocalMin;
    cert.reason = "reduced Hessian has a negative eigenvalue";
  } else {
    cert.kind = CertificateKind::Indeterminate;
    cert.reason = "reduced Hessian is singular within tolerance";
  }
  return cert;
}

}  // namespace hcx
