#include "hcx/builder.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hcx/error.hpp"

namespace hcx {

namespace {

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorCode::BadSequence, msg); }

Line through(double m1, double v1, double m2, double v2) {
  Line l;
  l.slope = (v2 - v1) / (m2 - m1);
  l.intercept = v1 - l.slope * m1;
  return l;
}

// Q(mu) = L(l) + s (mu - l) + k (mu - l)^2, k = (s' - s) / (4 eps)
PsiPiece blend(const Line& left, const Line& right, double center, double eps) {
  const double l = center - eps;
  const double s = left.slope;
  const double k = (right.slope - s) / (4.0 * eps);
  PsiPiece q;
  q.q2 = k;
  q.q1 = s - 2.0 * k * l;
  q.q0 = left(l) - s * l + k * l * l;
  return q;
}

bool blends_keep_sign(const Spectrum& s, const PiecewisePsi& psi, const std::vector<double>& centers, double eps) {
  constexpr int samples = 64;
  for (double o : centers) {
    for (int i = 0; i <= samples; ++i) {
      const double mu = o - eps + 2.0 * eps * i / samples;
      if (!(phi(s, mu) - psi.value(mu) > 0.0)) return false;
    }
  }
  return true;
}

}  // namespace

PiecewisePsi assemble_psi(const std::vector<Line>& lines, const std::vector<double>& centers, double eps) {
  if (lines.empty()) bad("at least one line is required");
  if (centers.size() + 1 != lines.size()) bad("need one blend center between consecutive lines");
  if (!(eps > 0.0)) bad("blend half-width must be positive");
  for (std::size_t j = 0; j < lines.size(); ++j) {
    if (!(lines[j].slope > 0.0)) bad("line slopes must be positive");
    if (j > 0 && !(lines[j].slope > lines[j - 1].slope)) bad("line slopes must increase");
  }
  for (std::size_t j = 0; j < centers.size(); ++j) {
    const double o = centers[j];
    const double v = lines[j](o);
    if (std::abs(v - lines[j + 1](o)) > 1e-9 * std::max(1.0, std::abs(v)))
      bad("consecutive lines do not intersect at the blend center");
    if (j > 0 && !(o - eps > centers[j - 1] + eps)) bad("blend intervals overlap");
  }

  std::vector<double> bps;
  std::vector<PsiPiece> pieces;
  for (std::size_t j = 0; j < lines.size(); ++j) {
    pieces.push_back({0.0, lines[j].slope, lines[j].intercept});
    if (j < centers.size()) {
      bps.push_back(centers[j] - eps);
      bps.push_back(centers[j] + eps);
      pieces.push_back(blend(lines[j], lines[j + 1], centers[j], eps));
    }
  }
  return PiecewisePsi(std::move(bps), std::move(pieces));
}

BuiltPsi build_psi(const Spectrum& s, const std::vector<double>& mus, const BuildOptions& opts) {
  if (mus.size() < 2 || mus.size() % 2 != 0) bad("need an even number (2d >= 2) of points");
  const std::size_t d = mus.size() / 2;
  const double lo = std::max(0.0, -s.lambda2());
  const double hi = -s.lambda1();
  for (std::size_t i = 0; i < mus.size(); ++i) {
    if (!(mus[i] > lo && mus[i] < hi)) {
      std::ostringstream os;
      os << "mu_" << i + 1 << " = " << mus[i] << " outside (" << lo << ", " << hi << ")";
      bad(os.str());
    }
    if (i > 0 && !(mus[i] > mus[i - 1])) bad("points must be strictly ascending");
  }
  if (!opts.o_overrides.empty() && opts.o_overrides.size() != d - 1)
    bad("need d - 1 intersection overrides");
  // phi is convex, so phi'(mu_1) >= 0 already makes it strictly increasing past mu_1
  if (phi_d1(s, mus[0]) < -1e-12 * (1.0 + phi(s, mus[0])))
    throw Error(ErrorCode::PhiNotIncreasing, "phi'(mu_1) < 0; phi is not increasing from mu_1");

  BuiltPsi out;
  out.lines.reserve(d);
  for (std::size_t j = 0; j < d; ++j) {
    const double m1 = mus[2 * j], m2 = mus[2 * j + 1];
    out.lines.push_back(through(m1, phi(s, m1), m2, phi(s, m2)));
  }
  for (std::size_t j = 0; j + 1 < d; ++j) {
    const Line& a = out.lines[j];
    Line& b = out.lines[j + 1];
    if (!(a.slope > 0.0) || !(b.slope > a.slope)) bad("secant slopes must be positive and increasing");
    double o;
    if (opts.o_overrides.empty()) {
      o = (b.intercept - a.intercept) / (a.slope - b.slope);
    } else {
      o = opts.o_overrides[j];
      const double m = mus[2 * j + 3];
      b = through(o, a(o), m, phi(s, m));
      if (!(b.slope > a.slope)) bad("override o_j makes the next line no steeper than the previous one");
    }
    if (!(o > mus[2 * j + 1] && o < mus[2 * j + 2])) {
      std::ostringstream os;
      os << "o_" << j + 1 << " = " << o << " not in (mu_" << 2 * j + 2 << ", mu_" << 2 * j + 3 << ")";
      bad(os.str());
    }
    out.centers.push_back(o);
  }
  if (!(out.lines[0].slope > 0.0)) bad("secant slopes must be positive");

  if (d == 1) {
    out.psi = PiecewisePsi({}, {{0.0, out.lines[0].slope, out.lines[0].intercept}});
    return out;
  }

  double eps = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j + 1 < d; ++j) {
    const double o = out.centers[j];
    eps = std::min({eps, std::abs(o - mus[2 * j + 1]), std::abs(o - mus[2 * j + 2])});
  }
  eps *= 0.5;
  if (opts.eps_override) eps = *opts.eps_override;

  for (;;) {
    PiecewisePsi psi = assemble_psi(out.lines, out.centers, eps);
    if (blends_keep_sign(s, psi, out.centers, eps)) {
      out.psi = std::move(psi);
      out.eps = eps;
      return out;
    }
    if (opts.eps_override) bad("blend with the given half-width crosses phi");
    if (++out.eps_halvings > 60) bad("could not find a blend width that avoids phi");
    eps *= 0.5;
  }
}

ConvexScalar psi_to_f0(const PiecewisePsi& psi, double a, double b) {
  if (a != 1.0 || b != 0.0)
    throw Error(ErrorCode::InvalidInstance, "psi to f0 conversion is defined for a = 1, b = 0 only");
  return ConvexScalar::from_psi(psi);
}

PiecewisePsi example2_displayed_psi() {
  return PiecewisePsi({3.7, 3.9, 4.2, 4.4}, {
                                               {0.0, 1.0 / 4.0, -1.0 / 4.0},
                                               {39.0 / 8.0, -1433.0 / 40.0, 53191.0 / 800.0},
                                               {0.0, 11.0 / 5.0, -383.0 / 50.0},
                                               {21.0, -871.0 / 5.0, 18139.0 / 50.0},
                                               {0.0, 53.0 / 5.0, -2189.0 / 50.0},
                                           });
}

TrslInstance canned_example(CannedExample which) {
  TrslInstance inst;
  inst.H = Mat::Zero(2, 2);
  inst.H(0, 0) = -5.0;
  inst.H(1, 1) = -1.0;
  inst.c = Vec::Ones(2);
  inst.a = 1.0;
  inst.b = 0.0;
  switch (which) {
    case CannedExample::Example1: inst.f0 = ConvexScalar::quartic_example1(); break;
    case CannedExample::Example2d3: inst.f0 = psi_to_f0(example2_displayed_psi()); break;
  }
  return inst;
}

TrslInstance build_instance(const TrslInstance& base, const std::vector<double>& mus, const BuildOptions& opts) {
  base.validate();
  const Spectrum s = decompose(base.H, base.c);
  TrslInstance inst = base;
  inst.a = 1.0;
  inst.b = 0.0;
  inst.f0 = psi_to_f0(build_psi(s, mus, opts).psi);
  return inst;
}

}  // namespace hcx
