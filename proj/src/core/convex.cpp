#include "hcx/convex.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <sstream>

#include "hcx/error.hpp"

namespace hcx {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = std::numeric_limits<double>::epsilon();

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// Root of an increasing d1 on [lo, hi] (d1(lo) <= t <= d1(hi)) by Newton
// steps kept inside the bracket, bisecting whenever Newton leaves it.
template <class F, class DF>
double solve_increasing(F d1, DF d2, double t, double lo, double hi) {
  const double ftol = 1e-12 * std::max(1.0, std::abs(t));
  double y = 0.5 * (lo + hi);
  for (int it = 0; it < 400; ++it) {
    const double r = d1(y) - t;
    if (std::abs(r) <= ftol) {
      // one more Newton step costs little and takes y to rounding level
      const double slope = d2(y);
      const double polished = slope > 0.0 ? y - r / slope : y;
      return polished >= lo && polished <= hi ? polished : y;
    }
    if (r < 0.0)
      lo = y;
    else
      hi = y;
    if (hi - lo <= 4.0 * kEps * std::max(1.0, std::abs(y))) return y;
    const double slope = d2(y);
    double next = slope > 0.0 ? y - r / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    y = next;
  }
  return y;
}

// Inverse of the increasing branch of q2 mu^2 + q1 mu + q0 = y, chosen to
// avoid cancellation.
double piece_inverse(const PsiPiece& p, double y) {
  if (p.linear()) return (y - p.q0) / p.q1;
  const double disc = std::max(0.0, p.q1 * p.q1 - 4.0 * p.q2 * (p.q0 - y));
  const double root = std::sqrt(disc);
  if (p.q1 >= 0.0) return 2.0 * (y - p.q0) / (p.q1 + root);
  return (-p.q1 + root) / (2.0 * p.q2);
}

// Antiderivative of psi^{-1}(y)/2 on one piece, without constant.
double piece_primitive(const PsiPiece& p, double y) {
  if (p.linear()) return y * y / (4.0 * p.q1) - p.q0 * y / (2.0 * p.q1);
  const double disc = std::max(0.0, p.q1 * p.q1 - 4.0 * p.q2 * (p.q0 - y));
  return -p.q1 * y / (4.0 * p.q2) + std::pow(disc, 1.5) / (24.0 * p.q2 * p.q2);
}

std::size_t y_piece(const PiecewiseFromPsi& f, double y) {
  auto it = std::lower_bound(f.y_breaks.begin(), f.y_breaks.end(), y);
  return static_cast<std::size_t>(it - f.y_breaks.begin());
}

}  // namespace

// -- PiecewisePsi -------------------------------------------------------------

PiecewisePsi::PiecewisePsi(std::vector<double> breakpoints, std::vector<PsiPiece> pieces)
    : breakpoints_(std::move(breakpoints)), pieces_(std::move(pieces)) {
  if (pieces_.empty() || pieces_.size() != breakpoints_.size() + 1)
    throw Error(ErrorCode::InvalidInstance, "piecewise psi needs one more piece than breakpoints");
  for (std::size_t k = 1; k < breakpoints_.size(); ++k)
    if (!(breakpoints_[k] > breakpoints_[k - 1]))
      throw Error(ErrorCode::InvalidInstance, "psi breakpoints must be strictly ascending");
  if (!pieces_.front().linear() || !pieces_.back().linear())
    throw Error(ErrorCode::NonMonotonePsi, "unbounded end pieces of psi must be linear");
  if (!(pieces_.front().q1 > 0.0) || !(pieces_.back().q1 > 0.0))
    throw Error(ErrorCode::NonMonotonePsi, "end pieces of psi must have positive slope");

  for (std::size_t k = 0; k < breakpoints_.size(); ++k) {
    const double bp = breakpoints_[k];
    const PsiPiece& left = pieces_[k];
    const PsiPiece& right = pieces_[k + 1];
    // monomial coefficients of narrow blends are large; allow their evaluation rounding
    auto size = [&](const PsiPiece& p) { return std::abs(p.q2) * bp * bp + std::abs(p.q1 * bp) + std::abs(p.q0); };
    auto slope_size = [&](const PsiPiece& p) { return 2.0 * std::abs(p.q2 * bp) + std::abs(p.q1); };
    const double v = left.value(bp);
    const double v_tol = 1e-10 * std::max(1.0, std::abs(v)) + 64.0 * kEps * std::max(size(left), size(right));
    if (std::abs(v - right.value(bp)) > v_tol)
      throw Error(ErrorCode::InvalidInstance, "psi is discontinuous at mu=" + fmt(bp));
    const double s = left.d1(bp);
    const double s_tol =
        1e-10 * std::max(1.0, std::abs(s)) + 64.0 * kEps * std::max(slope_size(left), slope_size(right));
    if (std::abs(s - right.d1(bp)) > s_tol)
      throw Error(ErrorCode::InvalidInstance, "psi' is discontinuous at mu=" + fmt(bp));
    if (!(s > 0.0)) throw Error(ErrorCode::NonMonotonePsi, "psi' <= 0 at mu=" + fmt(bp));
  }
}

std::size_t PiecewisePsi::piece_index(double mu) const {
  auto it = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), mu);
  return static_cast<std::size_t>(it - breakpoints_.begin());
}

// -- ConvexScalar -------------------------------------------------------------

const QuarticCoefficients& quartic_example1_coefficients() {
  static const QuarticCoefficients k = [] {
    const double r = std::sqrt(210.0);
    return QuarticCoefficients{
        12377.0 / 51072.0 - 25.0 * r / 3648.0,
        5.0 * r / 228.0 - 9257.0 / 7980.0,
        1366171.0 / 638400.0 - 35.0 * r / 1824.0,
        r / 190.0 + 4667.0 / 26600.0,
    };
  }();
  return k;
}

ConvexScalar ConvexScalar::quadratic(double alpha, double beta) {
  if (!(alpha > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta))
    throw Error(ErrorCode::InvalidInstance, "quadratic f0 needs alpha > 0");
  return ConvexScalar(Quadratic{alpha, beta}, -kInf, kInf);
}

ConvexScalar ConvexScalar::power_law(double alpha, double d) {
  if (!(alpha > 0.0) || !(d > 1.0) || !std::isfinite(alpha) || !std::isfinite(d))
    throw Error(ErrorCode::InvalidInstance, "power-law f0 needs alpha > 0 and d > 1");
  return ConvexScalar(PowerLaw{alpha, d}, 0.0, kInf);
}

ConvexScalar ConvexScalar::cubic(double alpha, double beta, double gamma) {
  // f0'' = 6 alpha y + 2 beta is bounded below by 2 beta on (0, inf) iff alpha >= 0.
  if (!(alpha >= 0.0) || !(beta > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta) ||
      !std::isfinite(gamma))
    throw Error(ErrorCode::InvalidInstance,
                "cubic f0 is not strongly convex on (0, inf): need alpha >= 0, beta > 0");
  return ConvexScalar(CubicPoly{alpha, beta, gamma}, 0.0, kInf);
}

ConvexScalar ConvexScalar::quartic_example1() { return ConvexScalar(QuarticExample1{}, -kInf, kInf); }

ConvexScalar ConvexScalar::from_psi(PiecewisePsi psi) {
  PiecewiseFromPsi f;
  const auto& bps = psi.breakpoints();
  const auto& pieces = psi.pieces();
  f.y_breaks.reserve(bps.size());
  for (std::size_t k = 0; k < bps.size(); ++k) f.y_breaks.push_back(pieces[k].value(bps[k]));
  f.constants.assign(pieces.size(), 0.0);
  for (std::size_t k = 1; k < pieces.size(); ++k) {
    const double yb = f.y_breaks[k - 1];
    f.constants[k] =
        f.constants[k - 1] + piece_primitive(pieces[k - 1], yb) - piece_primitive(pieces[k], yb);
  }
  f.psi = std::move(psi);
  return ConvexScalar(std::move(f), -kInf, kInf);
}

std::string ConvexScalar::kind() const {
  return std::visit(overloaded{
                        [](const Quadratic&) { return std::string("quadratic"); },
                        [](const PowerLaw&) { return std::string("power_law"); },
                        [](const CubicPoly&) { return std::string("cubic"); },
                        [](const QuarticExample1&) { return std::string("quartic_example1"); },
                        [](const PiecewiseFromPsi&) { return std::string("piecewise_from_psi"); },
                    },
                    form_);
}

void ConvexScalar::require_domain(double y) const {
  if (!in_domain(y))
    throw Error(ErrorCode::OutOfDomain, "y=" + fmt(y) + " outside the domain of " + kind() + " f0");
}

double ConvexScalar::eval(double y) const {
  require_domain(y);
  return std::visit(
      overloaded{
          [&](const Quadratic& q) { return (q.alpha * y + q.beta) * y; },
          [&](const PowerLaw& p) { return p.alpha * std::pow(y, p.d); },
          [&](const CubicPoly& c) { return ((c.alpha * y + c.beta) * y + c.gamma) * y; },
          [&](const QuarticExample1&) {
            const auto& k = quartic_example1_coefficients();
            return (((k.c4 * y + k.c3) * y + k.c2) * y + k.c1) * y;
          },
          [&](const PiecewiseFromPsi& f) {
            const std::size_t i = y_piece(f, y);
            return piece_primitive(f.psi.pieces()[i], y) + f.constants[i];
          },
      },
      form_);
}

double ConvexScalar::d1(double y) const {
  require_domain(y);
  return std::visit(
      overloaded{
          [&](const Quadratic& q) { return 2.0 * q.alpha * y + q.beta; },
          [&](const PowerLaw& p) { return p.alpha * p.d * std::pow(y, p.d - 1.0); },
          [&](const CubicPoly& c) { return (3.0 * c.alpha * y + 2.0 * c.beta) * y + c.gamma; },
          [&](const QuarticExample1&) {
            const auto& k = quartic_example1_coefficients();
            return ((4.0 * k.c4 * y + 3.0 * k.c3) * y + 2.0 * k.c2) * y + k.c1;
          },
          [&](const PiecewiseFromPsi& f) { return 0.5 * piece_inverse(f.psi.pieces()[y_piece(f, y)], y); },
      },
      form_);
}

double ConvexScalar::d2(double y) const {
  require_domain(y);
  return std::visit(
      overloaded{
          [&](const Quadratic& q) { return 2.0 * q.alpha; },
          [&](const PowerLaw& p) { return p.alpha * p.d * (p.d - 1.0) * std::pow(y, p.d - 2.0); },
          [&](const CubicPoly& c) { return 6.0 * c.alpha * y + 2.0 * c.beta; },
          [&](const QuarticExample1&) {
            const auto& k = quartic_example1_coefficients();
            return (12.0 * k.c4 * y + 6.0 * k.c3) * y + 2.0 * k.c2;
          },
          [&](const PiecewiseFromPsi& f) {
            // f0'' = 1 / (2 psi'(mu(y)))
            const PsiPiece& p = f.psi.pieces()[y_piece(f, y)];
            return 0.5 / p.d1(piece_inverse(p, y));
          },
      },
      form_);
}

double ConvexScalar::d3(double y) const {
  require_domain(y);
  return std::visit(
      overloaded{
          [&](const Quadratic&) { return 0.0; },
          [&](const PowerLaw& p) {
            return p.alpha * p.d * (p.d - 1.0) * (p.d - 2.0) * std::pow(y, p.d - 3.0);
          },
          [&](const CubicPoly& c) { return 6.0 * c.alpha; },
          [&](const QuarticExample1&) {
            const auto& k = quartic_example1_coefficients();
            return 24.0 * k.c4 * y + 6.0 * k.c3;
          },
          [&](const PiecewiseFromPsi& f) {
            // f0''' = -psi'' / (2 psi'^3)
            const PsiPiece& p = f.psi.pieces()[y_piece(f, y)];
            const double s = p.d1(piece_inverse(p, y));
            return -p.d2() / (2.0 * s * s * s);
          },
      },
      form_);
}

double ConvexScalar::inv_d1(double t) const {
  auto no_preimage = [&] {
    return Error(ErrorCode::NoPreimage, "t=" + fmt(t) + " outside the range of " + kind() + " f0'");
  };
  if (!std::isfinite(t)) throw no_preimage();
  auto d1f = [this](double y) { return d1(y); };
  auto d2f = [this](double y) { return d2(y); };
  return std::visit(
      overloaded{
          [&](const Quadratic& q) { return (t - q.beta) / (2.0 * q.alpha); },
          [&](const PowerLaw& p) {
            if (!(t > 0.0)) throw no_preimage();
            return std::pow(t / (p.alpha * p.d), 1.0 / (p.d - 1.0));
          },
          [&](const CubicPoly& c) {
            if (!(t > c.gamma)) throw no_preimage();
            double hi = 1.0;
            for (int i = 0; d1(hi) < t; ++i) {
              if (i > 2000) throw no_preimage();
              hi *= 2.0;
            }
            auto d1_closed = [&](double y) { return y <= 0.0 ? c.gamma : d1(y); };
            return solve_increasing(d1_closed, [&](double y) { return y <= 0.0 ? 2.0 * c.beta : d2(y); },
                                    t, 0.0, hi);
          },
          [&](const QuarticExample1&) {
            double lo = -1.0, hi = 1.0;
            for (int i = 0; d1(lo) > t; ++i) {
              if (i > 2000) throw no_preimage();
              lo *= 2.0;
            }
            for (int i = 0; d1(hi) < t; ++i) {
              if (i > 2000) throw no_preimage();
              hi *= 2.0;
            }
            return solve_increasing(d1f, d2f, t, lo, hi);
          },
          [&](const PiecewiseFromPsi& f) { return f.psi.value(2.0 * t); },
      },
      form_);
}

// -- TRS-L --------------------------------------------------------------------

void TrslInstance::validate() const {
  if (c.size() == 0 || H.rows() != c.size() || H.cols() != c.size())
    throw Error(ErrorCode::InvalidInstance, "H must be n x n with n = len(c) >= 1");
  if (!(a > 0.0) || !std::isfinite(a) || !std::isfinite(b))
    throw Error(ErrorCode::InvalidInstance, "constraint needs a > 0 (normalized form)");
  if (!H.allFinite() || !c.allFinite()) throw Error(ErrorCode::InvalidInstance, "non-finite data");
  const double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
  if ((H - H.transpose()).cwiseAbs().maxCoeff() > tol::symmetry * scale)
    throw Error(ErrorCode::NonSymmetric, "H is not symmetric");
}

double psi_trsl(const TrslInstance& inst, double mu) {
  return inst.a * inst.f0.inv_d1(0.5 * inst.a * mu) + inst.b;
}

double psi_trsl_d1(const TrslInstance& inst, double mu) {
  const double y = inst.f0.inv_d1(0.5 * inst.a * mu);
  return inst.a * inst.a / (2.0 * inst.f0.d2(y));
}

TrscInstance as_trsc(const TrslInstance& inst) {
  TrscInstance out;
  out.H = inst.H;
  out.c = inst.c;
  out.m = 1;
  const ConvexScalar f0 = inst.f0;
  const double a = inst.a, b = inst.b;
  out.f0.value = [f0](const Vec& y) { return f0.eval(y(0)); };
  out.f0.gradient = [f0](const Vec& y) { return Vec::Constant(1, f0.d1(y(0))); };
  out.f0.hessian = [f0](const Vec& y) { return Mat::Constant(1, 1, f0.d2(y(0))); };
  out.f.value = [a, b](const Vec& y) { return -a * y(0) - b; };
  out.f.gradient = [a](const Vec&) { return Vec::Constant(1, -a); };
  out.f.hessian = [](const Vec&) { return Mat::Zero(1, 1); };
  // start inside f0's domain
  const double lo = f0.domain_lo(), hi = f0.domain_hi();
  double y0 = 0.0;
  if (!(y0 > lo && y0 < hi)) y0 = std::isfinite(hi) ? 0.5 * (lo + hi) : lo + 1.0;
  out.y_start = Vec::Constant(1, y0);
  return out;
}

Vec y_of_mu_general(const TrscInstance& inst, double mu, const Vec& y0) {
  if (!(mu > 0.0)) throw Error(ErrorCode::InvalidInstance, "inner problem needs mu > 0");
  Vec y = y0.size() == inst.m ? y0 : Vec::Zero(inst.m);
  // +inf outside the domain so the line search backs off
  auto merit = [&](const Vec& v) {
    try {
      return inst.f0.value(v) + 0.5 * mu * inst.f.value(v);
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  auto grad = [&](const Vec& v) -> Vec { return inst.f0.gradient(v) + 0.5 * mu * inst.f.gradient(v); };

  const double gtol = 1e-10 * std::max(1.0, inst.f0.gradient(y).norm());
  for (int it = 0; it < 100; ++it) {
    const Vec gr = grad(y);
    if (gr.norm() <= gtol) return y;
    const Mat K = inst.f0.hessian(y) + 0.5 * mu * inst.f.hessian(y);
    Eigen::LLT<Mat> llt(K);
    if (llt.info() != Eigen::Success)
      throw Error(ErrorCode::InnerNoConverge, "inner Hessian not positive definite at mu=" + fmt(mu));
    const Vec step = -llt.solve(gr);
    // gradient stuck at rounding level while the Newton step is negligible
    if (step.norm() <= 1e-14 * (1.0 + y.norm())) return y + step;
    const double slope = gr.dot(step);
    const double base = merit(y);
    // near the minimizer merit differences drown in rounding; a full step that
    // halves the gradient is taken regardless
    bool full = false;
    try {
      full = grad(y + step).norm() <= 0.5 * gr.norm();
    } catch (const Error&) {
    }
    if (full) {
      y += step;
      continue;
    }
    double t = 1.0;
    while (!(merit(y + t * step) <= base + 1e-4 * t * slope)) {
      t *= 0.5;
      if (t < 1e-12) break;
    }
    if (t < 1e-12) {
      // merit differences are below rounding; a tiny Newton decrement means we are there
      if (-slope <= 1e-20 * (1.0 + std::abs(base))) return y + step;
      throw Error(ErrorCode::InnerNoConverge, "line search stalled at mu=" + fmt(mu));
    }
    y += t * step;
  }
  if (grad(y).norm() <= gtol) return y;
  throw Error(ErrorCode::InnerNoConverge, "no convergence in 100 Newton steps at mu=" + fmt(mu));
}

PsiGeneral psi_general(const TrscInstance& inst, double mu, const Vec& y0) {
  PsiGeneral out;
  out.y = y_of_mu_general(inst, mu, y0);
  const Mat K = inst.f0.hessian(out.y) + 0.5 * mu * inst.f.hessian(out.y);
  const Vec gf = inst.f.gradient(out.y);
  Eigen::LLT<Mat> llt(K);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorCode::NotPositiveDefinite, "inner Hessian not positive definite");
  out.psi = -inst.f.value(out.y);
  out.psi_d1 = 0.5 * gf.dot(llt.solve(gf));
  return out;
}

LogConcavity log_concavity_holds(const TrslInstance& inst, double lo, double hi, int samples) {
  const double a = inst.a, b = inst.b;
  const bool proven = std::visit(overloaded{
                                     [&](const Quadratic&) { return a > 0.0 && b >= 0.0; },
                                     [&](const PowerLaw&) { return a == 1.0 && b == 0.0; },
                                     [&](const CubicPoly&) { return a == 1.0 && b == 0.0; },
                                     [](const auto&) { return false; },
                                 },
                                 inst.f0.form());
  if (proven) return {LogConcavityVerdict::Proven, 0.0};

  samples = std::max(samples, 1);
  for (int k = 0; k < samples; ++k) {
    const double mu = lo + (hi - lo) * (k + 1.0) / (samples + 1.0);
    const double y = inst.f0.inv_d1(0.5 * a * mu);
    const double slack = a * y + b;
    if (!(slack > 0.0)) return {LogConcavityVerdict::FalsifiedAt, mu};
    if (inst.f0.d3(y) + a / slack * inst.f0.d2(y) < 0.0) return {LogConcavityVerdict::FalsifiedAt, mu};
  }
  return {LogConcavityVerdict::SampledTrue, 0.0};
}

// -- inner models -------------------------------------------------------------

namespace {

class TrslModel final : public InnerModel {
 public:
  TrslModel(double a, double b, ConvexScalar f0) : a_(a), b_(b), f0_(std::move(f0)) {}

  int m() const override { return 1; }
  InnerPoint solve(double mu, const Vec*) const override {
    const double y = f0_.inv_d1(0.5 * a_ * mu);
    return {Vec::Constant(1, y), a_ * y + b_, a_ * a_ / (2.0 * f0_.d2(y))};
  }
  double f0(const Vec& y) const override { return f0_.eval(y(0)); }
  Vec grad_f0(const Vec& y) const override { return Vec::Constant(1, f0_.d1(y(0))); }
  double f(const Vec& y) const override { return -a_ * y(0) - b_; }
  Vec grad_f(const Vec&) const override { return Vec::Constant(1, -a_); }
  Mat hess_term(const Vec& y, double) const override { return Mat::Constant(1, 1, f0_.d2(y(0))); }

 private:
  double a_, b_;
  ConvexScalar f0_;
};

class TrscModel final : public InnerModel {
 public:
  explicit TrscModel(TrscInstance inst) : inst_(std::move(inst)) {
    if (inst_.y_start.size() != inst_.m) inst_.y_start = Vec::Zero(inst_.m);
  }

  int m() const override { return inst_.m; }
  InnerPoint solve(double mu, const Vec* warm) const override {
    const PsiGeneral p = psi_general(inst_, mu, warm && warm->size() == inst_.m ? *warm : inst_.y_start);
    return {p.y, p.psi, p.psi_d1};
  }
  double f0(const Vec& y) const override { return inst_.f0.value(y); }
  Vec grad_f0(const Vec& y) const override { return inst_.f0.gradient(y); }
  double f(const Vec& y) const override { return inst_.f.value(y); }
  Vec grad_f(const Vec& y) const override { return inst_.f.gradient(y); }
  Mat hess_term(const Vec& y, double mu) const override {
    return inst_.f0.hessian(y) + 0.5 * mu * inst_.f.hessian(y);
  }
  std::optional<double> constant_f() const override { return inst_.constant_f; }

 private:
  TrscInstance inst_;
};

}  // namespace

Problem Problem::from(const TrslInstance& inst) {
  inst.validate();
  Problem p;
  p.H_ = inst.H;
  p.c_ = inst.c;
  p.spectrum_ = decompose(inst.H, inst.c);
  p.inner_ = std::make_shared<TrslModel>(inst.a, inst.b, inst.f0);
  return p;
}

Problem Problem::from(const TrscInstance& inst) {
  if (inst.m < 1 || !inst.f0.value || !inst.f0.gradient || !inst.f0.hessian || !inst.f.value ||
      !inst.f.gradient || !inst.f.hessian)
    throw Error(ErrorCode::InvalidInstance, "TRS-C instance needs m >= 1 and complete oracles");
  // strong convexity of the inner problem, spot-checked at mu = 1 only
  const Vec y0 = inst.y_start.size() == inst.m ? inst.y_start : Vec::Zero(inst.m);
  Eigen::LLT<Mat> llt(inst.f0.hessian(y0) + 0.5 * inst.f.hessian(y0));
  if (llt.info() != Eigen::Success)
    throw Error(ErrorCode::InvalidInstance, "hess f0 + 1/2 hess f is not positive definite at y_start");
  Problem p;
  p.H_ = inst.H;
  p.c_ = inst.c;
  p.spectrum_ = decompose(inst.H, inst.c);
  p.inner_ = std::make_shared<TrscModel>(inst);
  return p;
}

double Problem::objective(const Vec& x, const Vec& y) const {
  return 0.5 * x.dot(H_ * x) + c_.dot(x) + inner_->f0(y);
}

double Problem::constraint(const Vec& x, const Vec& y) const { return x.squaredNorm() + inner_->f(y); }

}  // namespace hcx
