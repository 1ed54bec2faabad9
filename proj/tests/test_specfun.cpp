#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "oracles/bessel_oracle.hpp"
#include "ssie2d/specfun.hpp"

using namespace ssie2d::specfun;
using std::numbers::pi;

namespace {

// Scale against which absolute errors of J/Y are judged: the function value,
// or its large-argument envelope where the function passes through a zero.
double envelope(cplx z, cplx value) {
  if (std::abs(z) < 2.0) return std::abs(value);
  const double env = std::sqrt(2.0 / (pi * std::abs(z))) * std::cosh(z.imag());
  return std::max(std::abs(value), env);
}

std::vector<cplx> random_arguments(int n, double rmin, double rmax, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> logr(std::log(rmin), std::log(rmax));
  std::uniform_real_distribution<double> arg(-0.49 * pi, 0.49 * pi);
  std::vector<cplx> out;
  for (int i = 0; i < n; ++i) out.push_back(std::polar(std::exp(logr(rng)), arg(rng)));
  return out;
}

}  // namespace

TEST(SpecfunExamples, SeriesLeadingTerms) {
  EXPECT_EQ(bessel_j(0, 0.0), cplx(1.0, 0.0));
  EXPECT_EQ(bessel_j(1, 0.0), cplx(0.0, 0.0));
}

TEST(SpecfunExamples, OracleValuesAtSmallArgument) {
  const auto o1 = oracle::bessel_series(1.0);
  const auto o2 = oracle::bessel_series(2.0);
  // Frozen from the 100-digit oracle.
  EXPECT_NEAR(o1.j0.real(), 0.7651976866, 1e-10);
  EXPECT_NEAR(o1.y0.real(), 0.0882569642, 1e-10);
  EXPECT_NEAR(o2.y0.real(), 0.5103756726, 1e-10);

  EXPECT_NEAR(std::abs(bessel_j(0, 1.0) - o1.j0) / std::abs(o1.j0), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(bessel_y(0, 1.0) - o1.y0) / std::abs(o1.y0), 0.0, 1e-13);
  EXPECT_NEAR(std::abs(bessel_y(0, 2.0) - o2.y0) / std::abs(o2.y0), 0.0, 1e-13);

  const cplx h = hankel2(0, 1.0);
  EXPECT_NEAR(h.real(), 0.7651977, 1e-7);
  EXPECT_NEAR(h.imag(), -0.0882570, 1e-7);
}

TEST(SpecfunExamples, Y1LaurentLeadingTerm) {
  for (double phase : {0.0, 0.3, -0.7}) {
    const cplx z = std::polar(1e-4, phase);
    const cplx ratio = bessel_y(1, z) / (-2.0 / (pi * z));
    EXPECT_NEAR(std::abs(ratio - 1.0), 0.0, 1e-6);
  }
}

TEST(SpecfunExamples, LossyDecayOfHankelModulus) {
  double previous = std::abs(hankel2(0, cplx(5.0, 0.0)));
  for (double im = -0.25; im >= -8.0; im -= 0.25) {
    const double current = std::abs(hankel2(0, cplx(5.0, im)));
    EXPECT_LT(current, previous) << "Im(z) = " << im;
    previous = current;
  }
}

TEST(SpecfunErrors, DomainChecks) {
  EXPECT_THROW(bessel_j(2, 1.0), ssie2d::DomainError);
  EXPECT_THROW(bessel_j(-1, 1.0), ssie2d::DomainError);
  EXPECT_THROW(bessel_j(0, 2e4), ssie2d::DomainError);
  EXPECT_THROW(bessel_y(0, 0.0), ssie2d::DomainError);
  EXPECT_THROW(bessel_y(1, cplx(-1.0, 0.5)), ssie2d::DomainError);
  EXPECT_THROW(bessel_y(0, cplx(0.0, 2.0)), ssie2d::DomainError);
  EXPECT_THROW(hankel2(0, cplx(-3.0, 0.0)), ssie2d::DomainError);
  EXPECT_THROW(hankel2(1, cplx(std::nan(""), 0.0)), ssie2d::DomainError);
}

TEST(SpecfunProperties, WronskianIdentity) {
  // J1 Y0 - J0 Y1 cancels by a factor ~exp(2|Im z|), so the J/Y form is only
  // checked where that loss stays within the tolerance budget.
  int checked = 0;
  for (const cplx z : random_arguments(400, 1e-3, 50.0, 7)) {
    if (std::abs(z.imag()) > 5.0) continue;
    const cplx w = bessel_j(1, z) * bessel_y(0, z) - bessel_j(0, z) * bessel_y(1, z);
    const cplx expected = 2.0 / (pi * z);
    EXPECT_LT(std::abs(w - expected) / std::abs(expected), 1e-9) << "z = " << z;
    if (++checked == 100) break;
  }
  EXPECT_EQ(checked, 100);
}

TEST(SpecfunProperties, HankelWronskianOverWholeDomain) {
  // J1 H0 - J0 H1 = -2j/(pi z); well conditioned in the lossy quadrant.
  const cplx j{0.0, 1.0};
  for (const cplx z : random_arguments(100, 1e-3, 50.0, 8)) {
    const cplx zz(z.real(), -std::abs(z.imag()));
    const auto h = hankel2_pair(zz);
    const cplx w = bessel_j(1, zz) * h.h0 - bessel_j(0, zz) * h.h1;
    const cplx expected = -2.0 * j / (pi * zz);
    const double scale = std::abs(bessel_j(1, zz) * h.h0) + std::abs(expected);
    EXPECT_LT(std::abs(w - expected) / scale, 1e-9) << "z = " << zz;
  }
}

TEST(SpecfunProperties, DerivativeOfH0IsMinusH1) {
  for (const cplx z : random_arguments(100, 1e-2, 50.0, 11)) {
    const double step = 1e-6 * std::abs(z);
    const cplx fd = (hankel2(0, z + step) - hankel2(0, z - step)) / (2.0 * step);
    const cplx h1 = hankel2(1, z);
    EXPECT_LT(std::abs(fd + h1) / std::abs(h1), 1e-5) << "z = " << z;
  }
}

TEST(SpecfunProperties, RealAxisValuesAreReal) {
  for (double x : {1e-3, 0.5, 2.405, 7.0, 11.99, 12.0, 30.0, 400.0, 9999.0}) {
    EXPECT_NEAR(bessel_j(0, x).imag(), 0.0, 1e-12) << x;
    EXPECT_NEAR(bessel_j(1, x).imag(), 0.0, 1e-12) << x;
    EXPECT_NEAR(bessel_y(0, x).imag(), 0.0, 1e-12) << x;
    EXPECT_NEAR(bessel_y(1, x).imag(), 0.0, 1e-12) << x;
  }
}

TEST(SpecfunOracle, JAndYAgainstHighPrecisionSeries) {
  auto points = random_arguments(150, 1e-3, 50.0, 2024);
  for (double x : {11.5, 11.999, 12.0, 12.001, 14.0, 30.0}) points.push_back(x);
  for (const cplx z : points) {
    const auto o = oracle::bessel_series(z);
    EXPECT_LT(std::abs(bessel_j(0, z) - o.j0) / envelope(z, o.j0), 1e-10) << "J0 z = " << z;
    EXPECT_LT(std::abs(bessel_j(1, z) - o.j1) / envelope(z, o.j1), 1e-10) << "J1 z = " << z;
    EXPECT_LT(std::abs(bessel_y(0, z) - o.y0) / envelope(z, o.y0), 1e-9) << "Y0 z = " << z;
    EXPECT_LT(std::abs(bessel_y(1, z) - o.y1) / envelope(z, o.y1), 1e-9) << "Y1 z = " << z;
  }
}

TEST(SpecfunOracle, HankelRelativeAccuracyIncludingLossyArguments) {
  // Lossy kernels put kr deep in the fourth quadrant where J - jY cancels.
  std::vector<cplx> points = random_arguments(150, 1e-3, 50.0, 99);
  for (double re : {0.3, 1.0, 2.5, 4.0, 6.0, 8.0, 11.0, 13.0}) {
    for (double im : {-0.5, -1.5, -3.0, -6.0, -9.0}) points.emplace_back(re, im);
  }
  for (const cplx z : points) {
    const auto o = oracle::bessel_series(z);
    EXPECT_LT(std::abs(hankel2(0, z) - o.h0) / std::abs(o.h0), 1e-9) << "H0 z = " << z;
    EXPECT_LT(std::abs(hankel2(1, z) - o.h1) / std::abs(o.h1), 1e-9) << "H1 z = " << z;
  }
}
