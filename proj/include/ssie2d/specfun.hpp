#ifndef SSIE2D_SPECFUN_HPP
#define SSIE2D_SPECFUN_HPP

// Cylindrical Bessel functions J0, J1, Y0, Y1 and Hankel functions of the
// second kind H0^(2), H1^(2) for complex argument.
//
// Two regimes are used:
//   |z| <  12  ascending power series
//   |z| >= 12  Hankel asymptotic expansion
// In the series regime H^(2) = J - jY cancels catastrophically once Im(z) is
// well below zero (lossy media), so there H^(2) is obtained from the
// continued fraction for H0'/H0 combined with the J-Wronskian instead.

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "ssie2d/errors.hpp"

namespace ssie2d::specfun {

using cplx = std::complex<double>;

inline constexpr double kSeriesLimit = 12.0;
inline constexpr double kMaxArgument = 1e4;
inline constexpr double kEulerGamma = 0.57721566490153286060651209;

struct Hankel2Pair {
  cplx h0;
  cplx h1;
};

namespace detail {

inline constexpr double kEps = std::numeric_limits<double>::epsilon();
inline constexpr double kPi = std::numbers::pi;

inline void check_order(int order) {
  if (order != 0 && order != 1)
    throw DomainError("Bessel order must be 0 or 1, got " + std::to_string(order));
}

inline void check_finite(cplx z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw DomainError("Bessel argument is not finite");
}

inline void check_magnitude(cplx z) {
  check_finite(z);
  if (std::abs(z) > kMaxArgument) throw DomainError("Bessel argument |z| exceeds 1e4");
}

inline void check_y_domain(cplx z) {
  check_magnitude(z);
  if (z == cplx{0.0, 0.0}) throw DomainError("Y/H^(2) undefined at z = 0");
  if (!(z.real() > 0.0)) throw DomainError("Y/H^(2) require Re(z) > 0");
}

// J0 and J1 from the ascending series.
inline std::array<cplx, 2> series_j01(cplx z) {
  const cplx q = -0.25 * z * z;
  cplx t0{1.0, 0.0};
  cplx t1 = 0.5 * z;
  cplx s0 = t0;
  cplx s1 = t1;
  for (int k = 1; k < 200; ++k) {
    t0 *= q / double(k * k);
    t1 *= q / double(k * (k + 1));
    s0 += t0;
    s1 += t1;
    if (std::abs(t0) <= kEps * 0.25 * std::abs(s0) && std::abs(t1) <= kEps * 0.25 * std::abs(s1) &&
        double(k) > 0.5 * std::abs(z))
      break;
  }
  return {s0, s1};
}

// Y0 and Y1 from the ascending series, given J0, J1 at the same argument.
inline std::array<cplx, 2> series_y01(cplx z, cplx j0, cplx j1) {
  const cplx q = -0.25 * z * z;
  const cplx lg = std::log(0.5 * z);
  // Y0 = (2/pi)(ln(z/2)+gamma) J0 - (2/pi) sum_{k>=1} H_k (-z^2/4)^k / (k!)^2
  // Y1 = (2/pi) ln(z/2) J1 - 2/(pi z)
  //      - (1/pi)(z/2) sum_{k>=0} (psi(k+1)+psi(k+2)) (-z^2/4)^k / (k!(k+1)!)
  cplx t0{1.0, 0.0};
  cplx t1{1.0, 0.0};
  double harmonic = 0.0;
  cplx s0{0.0, 0.0};
  cplx s1 = t1 * (1.0 - 2.0 * kEulerGamma);  // psi(1)+psi(2) = 1 - 2 gamma
  for (int k = 1; k < 200; ++k) {
    t0 *= q / double(k * k);
    t1 *= q / double(k * (k + 1));
    const double h_next = harmonic + 1.0 / double(k);
    const double psi_sum = (h_next - kEulerGamma) + (h_next + 1.0 / double(k + 1) - kEulerGamma);
    harmonic = h_next;
    const cplx a0 = t0 * harmonic;
    const cplx a1 = t1 * psi_sum;
    s0 += a0;
    s1 += a1;
    if (std::abs(a0) <= kEps * 0.25 * std::abs(s0) && std::abs(a1) <= kEps * 0.25 * std::abs(s1) &&
        double(k) > 0.5 * std::abs(z))
      break;
  }
  const cplx y0 = (2.0 / kPi) * ((lg + kEulerGamma) * j0 - s0);
  const cplx y1 = (2.0 / kPi) * lg * j1 - 2.0 / (kPi * z) - (0.5 * z / kPi) * s1;
  return {y0, y1};
}

// Hankel asymptotic P(z), Q(z) for order nu in {0,1}; truncated at the
// smallest term.
inline std::array<cplx, 2> asymptotic_pq(int nu, cplx z) {
  const double mu = 4.0 * nu * nu;
  const cplx inv8z = 1.0 / (8.0 * z);
  cplx p{1.0, 0.0};
  cplx q{0.0, 0.0};
  cplx term{1.0, 0.0};
  double prev = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= (mu - odd * odd) / double(k) * inv8z;
    const double mag = std::abs(term);
    if (mag > prev) break;
    // Terms alternate between P and Q with signs (+Q, -P, -Q, +P, ...).
    switch (k % 4) {
      case 1: q += term; break;
      case 2: p -= term; break;
      case 3: q -= term; break;
      default: p += term; break;
    }
    if (mag < kEps * 0.1) break;
    prev = mag;
  }
  return {p, q};
}

inline cplx asymptotic_phase(int nu, cplx z) {
  return z - (0.5 * nu + 0.25) * kPi;
}

// H1/H0 of the second kind from the continued fraction for H0'/H0
// (Steed's CF2, conjugated for the H^(2) branch), modified Lentz.
inline cplx hankel2_ratio_cf(cplx z) {
  constexpr double tiny = 1e-300;
  const cplx j{0.0, 1.0};
  cplx f = tiny;
  cplx c = f;
  cplx d = 0.0;
  for (int k = 1; k < 10000; ++k) {
    const double a = 0.25 * (2.0 * k - 1.0) * (2.0 * k - 1.0);
    const cplx b = 2.0 * (z - double(k) * j);
    d = b + a * d;
    if (d == 0.0) d = tiny;
    c = b + a / c;
    if (c == 0.0) c = tiny;
    d = 1.0 / d;
    const cplx delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  const cplx log_deriv = -0.5 / z - j - (j / z) * f;
  return -log_deriv;
}

}  // namespace detail

// Bessel function of the first kind J_order(z), order in {0,1}, |z| <= 1e4.
inline cplx bessel_j(int order, cplx z) {
  detail::check_order(order);
  detail::check_magnitude(z);
  if (std::abs(z) < kSeriesLimit) return detail::series_j01(z)[order];
  const auto [p, q] = detail::asymptotic_pq(order, z);
  const cplx w = detail::asymptotic_phase(order, z);
  return std::sqrt(2.0 / (detail::kPi * z)) * (p * std::cos(w) - q * std::sin(w));
}

// Bessel function of the second kind Y_order(z); requires Re(z) > 0.
inline cplx bessel_y(int order, cplx z) {
  detail::check_order(order);
  detail::check_y_domain(z);
  if (std::abs(z) < kSeriesLimit) {
    const auto jj = detail::series_j01(z);
    return detail::series_y01(z, jj[0], jj[1])[order];
  }
  const auto [p, q] = detail::asymptotic_pq(order, z);
  const cplx w = detail::asymptotic_phase(order, z);
  return std::sqrt(2.0 / (detail::kPi * z)) * (p * std::sin(w) + q * std::cos(w));
}

// H0^(2)(z) and H1^(2)(z) together; this is what the integral kernels use.
inline Hankel2Pair hankel2_pair(cplx z) {
  detail::check_y_domain(z);
  const cplx j{0.0, 1.0};
  const double az = std::abs(z);
  if (az >= kSeriesLimit) {
    const cplx pre = std::sqrt(2.0 / (detail::kPi * z));
    Hankel2Pair out;
    for (int nu = 0; nu < 2; ++nu) {
      const auto [p, q] = detail::asymptotic_pq(nu, z);
      const cplx h = pre * std::exp(-j * detail::asymptotic_phase(nu, z)) * (p - j * q);
      (nu == 0 ? out.h0 : out.h1) = h;
    }
    return out;
  }
  const auto jj = detail::series_j01(z);
  if (z.imag() >= -1.0 || az < 2.0) {
    const auto yy = detail::series_y01(z, jj[0], jj[1]);
    return {jj[0] - j * yy[0], jj[1] - j * yy[1]};
  }
  // J1 H0 - J0 H1 = -2j/(pi z)
  const cplx ratio = detail::hankel2_ratio_cf(z);
  const cplx h0 = -2.0 * j / (detail::kPi * z * (jj[1] - jj[0] * ratio));
  return {h0, ratio * h0};
}

// Hankel function of the second kind H_order^(2)(z) = J - jY.
inline cplx hankel2(int order, cplx z) {
  detail::check_order(order);
  const auto h = hankel2_pair(z);
  return order == 0 ? h.h0 : h.h1;
}

}  // namespace ssie2d::specfun

#endif  // SSIE2D_SPECFUN_HPP
