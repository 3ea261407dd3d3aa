#include "hcx/spectral.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "hcx/error.hpp"

namespace hcx {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonSymmetric: return "NonSymmetric";
    case ErrorCode::PoleAt: return "PoleAt";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::NoPreimage: return "NoPreimage";
    case ErrorCode::InnerNoConverge: return "InnerNoConverge";
    case ErrorCode::ConvexInstance: return "ConvexInstance";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DegenerateG1: return "DegenerateG1";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::BadSequence: return "BadSequence";
    case ErrorCode::PhiNotIncreasing: return "PhiNotIncreasing";
    case ErrorCode::NonMonotonePsi: return "NonMonotonePsi";
    case ErrorCode::InvalidInstance: return "InvalidInstance";
    case ErrorCode::Parse: return "Parse";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

double Spectrum::lambda2() const {
  return n() > 1 ? lambdas(1) : std::numeric_limits<double>::infinity();
}

Mat Spectrum::reconstruct() const {
  return eigvecs * lambdas.asDiagonal() * eigvecs.transpose();
}

Spectrum decompose(const Mat& H, const Vec& c) {
  if (H.rows() == 0 || H.rows() != H.cols())
    throw Error(ErrorCode::DimensionMismatch, "H must be square and non-empty");
  if (c.size() != H.rows())
    throw Error(ErrorCode::DimensionMismatch, "c length differs from H dimension");

  const double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
  const double asym = (H - H.transpose()).cwiseAbs().maxCoeff();
  if (asym > tol::symmetry * scale) {
    std::ostringstream os;
    os << "asymmetry " << asym << " exceeds tolerance";
    throw Error(ErrorCode::NonSymmetric, os.str());
  }

  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (H + H.transpose()));
  Spectrum s;
  s.lambdas = es.eigenvalues();
  s.eigvecs = es.eigenvectors();
  for (Eigen::Index j = 0; j < s.eigvecs.cols(); ++j) {
    Eigen::Index imax = 0;
    s.eigvecs.col(j).cwiseAbs().maxCoeff(&imax);
    if (s.eigvecs(imax, j) < 0.0) s.eigvecs.col(j) *= -1.0;
  }
  s.g = s.eigvecs.transpose() * c;
  s.zero_threshold = tol::zero_coefficient * c.norm();

  const double l1 = s.lambdas(0);
  const double gap = tol::eigengap * std::max(1.0, std::abs(l1));
  int mult = 0;
  double block = 0.0;
  for (int i = 0; i < s.n(); ++i) {
    if (s.lambdas(i) - l1 <= gap) {
      ++mult;
      block += s.g(i) * s.g(i);
    }
  }
  s.lambda1_multiplicity = mult;
  s.g1_block_norm = std::sqrt(block);
  return s;
}

namespace {

// Shared loop for phi and its derivatives: sum coef * g_i^2 / (lambda_i + mu)^power.
double secular_sum(const Spectrum& s, double mu, int power, double coef) {
  double acc = 0.0;
  for (int i = 0; i < s.n(); ++i) {
    if (!s.active(i)) continue;
    const double d = s.lambdas(i) + mu;
    if (std::abs(d) < tol::pole) {
      std::ostringstream os;
      os << "mu=" << mu << " is within " << tol::pole << " of pole -lambda_" << (i + 1);
      throw Error(ErrorCode::PoleAt, os.str());
    }
    acc += coef * s.g(i) * s.g(i) / std::pow(d, power);
  }
  return acc;
}

}  // namespace

double phi(const Spectrum& s, double mu) { return secular_sum(s, mu, 2, 1.0); }
double phi_d1(const Spectrum& s, double mu) { return secular_sum(s, mu, 3, -2.0); }
double phi_d2(const Spectrum& s, double mu) { return secular_sum(s, mu, 4, 6.0); }

Vec x_of_mu(const Spectrum& s, double mu) {
  Vec w = Vec::Zero(s.n());
  for (int i = 0; i < s.n(); ++i) {
    if (!s.active(i)) continue;
    const double d = s.lambdas(i) + mu;
    if (std::abs(d) < tol::pole) {
      std::ostringstream os;
      os << "mu=" << mu << " is within " << tol::pole << " of pole -lambda_" << (i + 1);
      throw Error(ErrorCode::PoleAt, os.str());
    }
    w(i) = -s.g(i) / d;
  }
  return s.eigvecs * w;
}

}  // namespace hcx
