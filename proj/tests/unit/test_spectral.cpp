#include "doctest.h"

#include "hcx/error.hpp"
#include "hcx/spectral.hpp"
#include "oracles.hpp"

using namespace hcx;

namespace {

Mat diag2(double a, double b) {
  Mat H = Mat::Zero(2, 2);
  H(0, 0) = a;
  H(1, 1) = b;
  return H;
}

}  // namespace

TEST_CASE("decompose: diagonal example data") {
  const Spectrum s = decompose(diag2(-5, -1), Vec::Ones(2));
  CHECK(s.lambdas(0) == doctest::Approx(-5));
  CHECK(s.lambdas(1) == doctest::Approx(-1));
  CHECK(std::abs(s.g(0)) == doctest::Approx(1));
  CHECK(std::abs(s.g(1)) == doctest::Approx(1));
  CHECK(s.lambda1_multiplicity == 1);
  CHECK_FALSE(s.g1_zero());
}

TEST_CASE("decompose: identity with zero linear term") {
  const Spectrum s = decompose(Mat::Identity(2, 2), Vec::Zero(2));
  CHECK(s.lambdas(0) == doctest::Approx(1));
  CHECK(s.lambdas(1) == doctest::Approx(1));
  CHECK(s.g.norm() == 0.0);
  CHECK(s.lambda1_multiplicity == 2);
  CHECK(s.g1_zero());
}

TEST_CASE("decompose: random symmetric matrices reconstruct") {
  auto r = oracle::rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = oracle::uniform_int(r, 1, 7);
    Mat A(n, n);
    for (int j = 0; j < n; ++j) A.col(j) = oracle::gaussian(r, n);
    const Mat H = 0.5 * (A + A.transpose());
    const Vec c = oracle::gaussian(r, n);
    const Spectrum s = decompose(H, c);
    CHECK((s.reconstruct() - H).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((s.eigvecs.transpose() * s.eigvecs - Mat::Identity(n, n)).norm() <= 1e-12 * n);
    for (int i = 1; i < n; ++i) CHECK(s.lambdas(i) >= s.lambdas(i - 1));
    CHECK((s.eigvecs.transpose() * c - s.g).norm() <= 1e-12 * (1 + c.norm()));
  }
}

TEST_CASE("decompose: errors") {
  Mat H = diag2(-1, 2);
  H(0, 1) = 1e-3;
  CHECK_THROWS_AS(decompose(H, Vec::Ones(2)), Error);
  try {
    decompose(H, Vec::Ones(2));
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonSymmetric);
  }
  try {
    decompose(Mat::Identity(2, 2), Vec::Ones(3));
    FAIL("dimension mismatch accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DimensionMismatch);
  }
}

TEST_CASE("decompose: near-ties count toward the multiplicity") {
  const Spectrum s = decompose(diag2(-1.0, -1.0 + 1e-12), Vec::Ones(2));
  CHECK(s.lambda1_multiplicity == 2);
  const Spectrum t = decompose(diag2(-1.0, -1.0 + 1e-6), Vec::Ones(2));
  CHECK(t.lambda1_multiplicity == 1);
}

TEST_CASE("phi: hand values on the diagonal example") {
  const Spectrum s = decompose(diag2(-5, -1), Vec::Ones(2));
  CHECK(phi(s, 3.0) == doctest::Approx(0.5).epsilon(1e-15));
  // 1/(mu-5)^2 + 1/(mu-1)^2 and derivatives at mu = 2
  CHECK(phi(s, 2.0) == doctest::Approx(1.0 / 9 + 1.0));
  CHECK(phi_d1(s, 2.0) == doctest::Approx(-2.0 / -27 - 2.0));
  CHECK(phi_d2(s, 2.0) == doctest::Approx(6.0 / 81 + 6.0));
}

TEST_CASE("phi: zero linear term gives zero everywhere") {
  const Spectrum s = decompose(diag2(-5, -1), Vec::Zero(2));
  for (double mu : {0.3, 2.0, 7.0}) {
    CHECK(phi(s, mu) == 0.0);
    CHECK(phi_d1(s, mu) == 0.0);
    CHECK(x_of_mu(s, mu).norm() == 0.0);
  }
}

TEST_CASE("phi: pole guard applies only to active terms") {
  Vec c(2);
  c << 0.0, 1.0;
  const Spectrum s = decompose(diag2(-5, -1), c);
  CHECK_NOTHROW(phi(s, 5.0));  // g_1 = 0 removes the pole at 5
  try {
    phi(s, 1.0 + 1e-9);
    FAIL("pole not detected");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::PoleAt);
  }
  CHECK_NOTHROW(phi(s, 1.0 + 1e-7));
}

TEST_CASE("phi: derivatives agree with finite differences and a dense solve") {
  auto r = oracle::rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = oracle::uniform_int(r, 2, 6);
    Vec lam(n);
    for (int i = 0; i < n; ++i) lam(i) = oracle::uniform(r, -4, 4);
    std::sort(lam.data(), lam.data() + n);
    const auto rot = oracle::with_spectrum(r, lam);
    const Vec c = oracle::gaussian(r, n);
    const Spectrum s = decompose(rot.H, c);
    const double mu = oracle::uniform(r, -3, 6);
    const double dist = (lam.array() + mu).abs().minCoeff();
    if (dist < 0.05) continue;
    const double h = 1e-6 * std::max(1.0, std::abs(mu));
    const double fd1 = oracle::central_diff([&](double m) { return phi(s, m); }, mu, h);
    const double fd2 = oracle::central_diff([&](double m) { return phi_d1(s, m); }, mu, h);
    const double d1 = phi_d1(s, mu), d2 = phi_d2(s, mu);
    CHECK(std::abs(fd1 - d1) <= 1e-6 * std::max(1.0, std::abs(d1)));
    CHECK(std::abs(fd2 - d2) <= 1e-6 * std::max(1.0, std::abs(d2)));
    CHECK(phi(s, mu) == doctest::Approx(oracle::phi_dense(rot.H, c, mu)).epsilon(1e-9));
  }
}

TEST_CASE("x_of_mu: stationarity and norm identity") {
  auto r = oracle::rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = oracle::uniform_int(r, 1, 6);
    Mat A(n, n);
    for (int j = 0; j < n; ++j) A.col(j) = oracle::gaussian(r, n);
    const Mat H = 0.5 * (A + A.transpose());
    const Vec c = oracle::gaussian(r, n);
    const Spectrum s = decompose(H, c);
    const double mu = -s.lambda1() + oracle::uniform(r, 0.1, 3.0);
    const Vec x = x_of_mu(s, mu);
    CHECK(((H + mu * Mat::Identity(n, n)) * x + c).norm() <= 1e-10 * (1 + c.norm()));
    CHECK(x.squaredNorm() == doctest::Approx(phi(s, mu)).epsilon(1e-12));
  }
}

TEST_CASE("x_of_mu: example points") {
  const Spectrum s = decompose(diag2(-5, -1), Vec::Ones(2));
  const Vec x2 = x_of_mu(s, 3.72);
  CHECK(x2(0) == doctest::Approx(0.78).epsilon(0.01));
  CHECK(x2(1) == doctest::Approx(-0.37).epsilon(0.01));
  const Vec xg = x_of_mu(s, 5.63);
  CHECK(xg(0) == doctest::Approx(-1.58).epsilon(0.01));
  CHECK(xg(1) == doctest::Approx(-0.22).epsilon(0.02));
}

TEST_CASE("phi: convex between the two smallest poles and decreasing past -lambda_1") {
  auto r = oracle::rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = oracle::uniform_int(r, 2, 6);
    Vec lam(n);
    for (int i = 0; i < n; ++i) lam(i) = oracle::uniform(r, -5, 3);
    std::sort(lam.data(), lam.data() + n);
    if (lam(1) - lam(0) < 0.2) continue;
    const auto rot = oracle::with_spectrum(r, lam);
    const Spectrum s = decompose(rot.H, oracle::gaussian(r, n));
    for (int k = 1; k < 20; ++k) {
      const double mu = -lam(1) + (lam(1) - lam(0)) * k / 20.0;
      CHECK(phi_d2(s, mu) > 0.0);
      const double right = -lam(0) + 0.05 * k;
      CHECK(phi_d1(s, right) < 0.0);
    }
    CHECK(phi(s, 1e8) < 1e-10);
  }
}
