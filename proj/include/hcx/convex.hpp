#pragma once

#include <functional>
#include <memory>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hcx/spectral.hpp"

namespace hcx {

/// One piece of a piecewise psi: q2 mu^2 + q1 mu + q0 (q2 == 0 for a line).
struct PsiPiece {
  double q2 = 0.0;
  double q1 = 0.0;
  double q0 = 0.0;

  double value(double mu) const { return (q2 * mu + q1) * mu + q0; }
  double d1(double mu) const { return 2.0 * q2 * mu + q1; }
  double d2() const { return 2.0 * q2; }
  bool linear() const { return q2 == 0.0; }
};

/// C^1, strictly increasing piecewise-quadratic function of mu.
///
/// Piece k is valid on (breakpoints[k-1], breakpoints[k]]; the first piece
/// extends to -inf and the last to +inf, so both must be linear.
class PiecewisePsi {
 public:
  PiecewisePsi() = default;
  /// Throws NonMonotonePsi or InvalidInstance when the invariants fail.
  PiecewisePsi(std::vector<double> breakpoints, std::vector<PsiPiece> pieces);

  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<PsiPiece>& pieces() const { return pieces_; }

  std::size_t piece_index(double mu) const;
  double value(double mu) const { return pieces_[piece_index(mu)].value(mu); }
  double d1(double mu) const { return pieces_[piece_index(mu)].d1(mu); }
  double d2(double mu) const { return pieces_[piece_index(mu)].d2(); }

 private:
  std::vector<double> breakpoints_;
  std::vector<PsiPiece> pieces_;
};

/// f0(y) = alpha y^2 + beta y, alpha > 0, on R.
struct Quadratic {
  double alpha;
  double beta;
};
/// f0(y) = alpha y^d, alpha > 0, d > 1, on (0, inf).
struct PowerLaw {
  double alpha;
  double d;
};
/// f0(y) = alpha y^3 + beta y^2 + gamma y on (0, inf); alpha >= 0, beta > 0.
struct CubicPoly {
  double alpha;
  double beta;
  double gamma;
};
/// The fixed quartic with two local non-global minimizers (H = diag(-5,-1), c = (1,1)).
struct QuarticExample1 {};
/// f0 with f0'(y) = psi^{-1}(y) / 2, i.e. y(mu) = psi(mu) for a = 1, b = 0.
struct PiecewiseFromPsi {
  PiecewisePsi psi;
  std::vector<double> y_breaks;   // psi(breakpoints)
  std::vector<double> constants;  // integration constant per piece
};

/// Closed family of strongly convex scalar functions with derivatives up to
/// third order and an inverse first derivative.
class ConvexScalar {
 public:
  using Form = std::variant<Quadratic, PowerLaw, CubicPoly, QuarticExample1, PiecewiseFromPsi>;

  static ConvexScalar quadratic(double alpha, double beta);
  static ConvexScalar power_law(double alpha, double d);
  static ConvexScalar cubic(double alpha, double beta, double gamma);
  static ConvexScalar quartic_example1();
  /// Integrates f0' = psi^{-1}/2 piecewise; the first piece carries no constant.
  static ConvexScalar from_psi(PiecewisePsi psi);

  const Form& form() const { return form_; }
  std::string kind() const;
  double domain_lo() const { return lo_; }
  double domain_hi() const { return hi_; }
  bool in_domain(double y) const { return y > lo_ && y < hi_; }

  double eval(double y) const;
  double d1(double y) const;
  double d2(double y) const;
  double d3(double y) const;
  /// Preimage of t under d1; NoPreimage if t is outside d1(domain).
  double inv_d1(double t) const;

 private:
  explicit ConvexScalar(Form form, double lo, double hi) : form_(std::move(form)), lo_(lo), hi_(hi) {}
  void require_domain(double y) const;

  Form form_;
  double lo_ = -std::numeric_limits<double>::infinity();
  double hi_ = std::numeric_limits<double>::infinity();
};

/// Coefficients of the Example-1 quartic, highest degree first.
struct QuarticCoefficients {
  double c4, c3, c2, c1;
};
const QuarticCoefficients& quartic_example1_coefficients();

/// min 1/2 x'Hx + c'x + f0(y)  s.t.  x'x - a y - b <= 0, scalar y.
struct TrslInstance {
  Mat H;
  Vec c;
  double a = 1.0;
  double b = 0.0;
  ConvexScalar f0 = ConvexScalar::quadratic(1.0, 0.0);

  int n() const { return static_cast<int>(c.size()); }
  /// Dimension, symmetry and a > 0; throws InvalidInstance / NonSymmetric.
  void validate() const;
};

/// psi(mu) = a (f0')^{-1}(a mu / 2) + b
double psi_trsl(const TrslInstance& inst, double mu);
/// psi'(mu) = a^2 / (2 f0''(y(mu)))
double psi_trsl_d1(const TrslInstance& inst, double mu);

/// Value / gradient / Hessian oracle of a convex function of y in R^m.
struct VectorFunction {
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;
  std::function<Mat(const Vec&)> hessian;
};

/// min 1/2 x'Hx + c'x + f0(y)  s.t.  x'x + f(y) <= 0, y in R^m.
struct TrscInstance {
  Mat H;
  Vec c;
  int m = 1;
  VectorFunction f0;
  VectorFunction f;
  Vec y_start;                      // initial inner iterate; zeros when empty
  std::optional<double> constant_f; // set when f is known to be constant
};

/// The same problem with f(y) = -a y - b.
TrscInstance as_trsc(const TrslInstance& inst);

/// argmin_y f0(y) + (mu/2) f(y) by damped Newton with Armijo backtracking.
Vec y_of_mu_general(const TrscInstance& inst, double mu, const Vec& y0);

struct PsiGeneral {
  double psi;
  double psi_d1;
  Vec y;
};
/// psi = -f(y(mu)), psi' = 1/2 grad f' [hess f0 + mu/2 hess f]^{-1} grad f.
PsiGeneral psi_general(const TrscInstance& inst, double mu, const Vec& y0);

enum class LogConcavityVerdict { Proven, SampledTrue, FalsifiedAt };
struct LogConcavity {
  LogConcavityVerdict verdict;
  double mu = 0.0;  // witness when FalsifiedAt
};

/// Concavity of ln psi on (lo, hi), via f0''' + a/(ay+b) f0'' >= 0 at y(mu).
LogConcavity log_concavity_holds(const TrslInstance& inst, double lo, double hi, int samples);

// -- secular view of an instance ------------------------------------------

struct InnerPoint {
  Vec y;
  double psi;
  double psi_d1;
};

/// The y-side of the problem as seen by the secular analysis: for a given
/// multiplier, the inner minimizer y(mu) and psi(mu) = -f(y(mu)).
class InnerModel {
 public:
  virtual ~InnerModel() = default;
  virtual int m() const = 0;
  /// warm may be null; vector-y models use it as the Newton starting point.
  virtual InnerPoint solve(double mu, const Vec* warm) const = 0;
  virtual double f0(const Vec& y) const = 0;
  virtual Vec grad_f0(const Vec& y) const = 0;
  virtual double f(const Vec& y) const = 0;
  virtual Vec grad_f(const Vec& y) const = 0;
  /// hess f0(y) + (mu/2) hess f(y)
  virtual Mat hess_term(const Vec& y, double mu) const = 0;
  virtual std::optional<double> constant_f() const { return std::nullopt; }
};

/// H, c, their spectrum and the inner model, bundled once per instance.
class Problem {
 public:
  static Problem from(const TrslInstance& inst);
  static Problem from(const TrscInstance& inst);

  const Mat& H() const { return H_; }
  const Vec& c() const { return c_; }
  const Spectrum& spectrum() const { return spectrum_; }
  const InnerModel& inner() const { return *inner_; }
  int n() const { return static_cast<int>(c_.size()); }

  double objective(const Vec& x, const Vec& y) const;
  /// x'x + f(y); feasible when <= 0
  double constraint(const Vec& x, const Vec& y) const;

 private:
  Mat H_;
  Vec c_;
  Spectrum spectrum_;
  std::shared_ptr<const InnerModel> inner_;
};

}  // namespace hcx
