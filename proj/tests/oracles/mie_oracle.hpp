#ifndef SSIE2D_TESTS_MIE_ORACLE_HPP
#define SSIE2D_TESTS_MIE_ORACLE_HPP

// Echo width of a lossless dielectric circular cylinder under a TM plane
// wave travelling along +x, from Boost's Bessel functions.
//
//   E_inc = sum j^-n J_n(k0 r) e^{jn phi}, E_s = sum j^-n a_n H_n(k0 r) e^{jn phi}
//   sigma(phi) = (4/k0) |sum a_n e^{jn phi}|^2

#include <cmath>
#include <complex>
#include <vector>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/bessel_prime.hpp>
#include <boost/math/special_functions/hankel.hpp>

namespace oracle {

inline std::vector<double> mie_echo_width(double radius, double eps_rel, double k0, const std::vector<double>& phi) {
  using cplx = std::complex<double>;
  namespace bm = boost::math;
  const double k1 = k0 * std::sqrt(eps_rel);
  const double x0 = k0 * radius, x1 = k1 * radius;
  const int nmax = int(std::ceil(x1)) + 25;
  std::vector<cplx> a(std::size_t(nmax) + 1);
  for (int n = 0; n <= nmax; ++n) {
    const double j0 = bm::cyl_bessel_j(n, x0), j0p = bm::cyl_bessel_j_prime(n, x0);
    const double j1 = bm::cyl_bessel_j(n, x1), j1p = bm::cyl_bessel_j_prime(n, x1);
    const cplx h0 = bm::cyl_hankel_2(n, x0);
    const cplx h0p = 0.5 * (bm::cyl_hankel_2(n - 1, x0) - bm::cyl_hankel_2(n + 1, x0));
    a[std::size_t(n)] = -(k1 * j0 * j1p - k0 * j0p * j1) / (k1 * h0 * j1p - k0 * h0p * j1);
  }
  std::vector<double> out;
  for (double p : phi) {
    cplx s = a[0];
    for (int n = 1; n <= nmax; ++n) s += 2.0 * a[std::size_t(n)] * std::cos(n * p);
    out.push_back(4.0 / k0 * std::norm(s));
  }
  return out;
}

}  // namespace oracle

#endif
