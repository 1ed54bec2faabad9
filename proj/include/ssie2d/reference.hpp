#ifndef SSIE2D_REFERENCE_HPP
#define SSIE2D_REFERENCE_HPP

// Reference solutions.
//
// mie_cylinder_rcs: TM cylindrical-harmonic series for a homogeneous circular
// cylinder,
//   sigma(phi) = (4/k0) |a_0 + 2 sum_{n>=1} a_n cos(n phi)|^2.
//
// pmchwt_solve: two-current formulation with both E (magnetic current) and
// H (electric current) unknown on every piece. Each object contributes its
// interior relation (L + U) E - P H = 0; the outer pieces additionally carry
// the exterior relation (L - U0) E + P0 H = 2 L E_inc. Kernels and
// quadrature are the ones of the single-source solver.

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "ssie2d/assembly.hpp"
#include "ssie2d/config.hpp"
#include "ssie2d/geometry.hpp"
#include "ssie2d/linalg.hpp"
#include "ssie2d/postproc.hpp"
#include "ssie2d/specfun.hpp"

namespace ssie2d {

namespace detail {

// J_0..J_nmax(z) by Miller's backward recurrence, normalised against the
// larger of J0, J1.
inline std::vector<cplx> bessel_j_orders(int nmax, cplx z) {
  std::vector<cplx> out(std::size_t(nmax) + 1, cplx{0.0, 0.0});
  if (z == cplx{0.0, 0.0}) {
    out[0] = 1.0;
    return out;
  }
  const double az = std::abs(z);
  const int start = int(std::max<double>(nmax, az) + 30.0 + std::sqrt(40.0 * std::max<double>(nmax, az)));
  cplx jp1{0.0, 0.0}, jn{1e-300, 0.0};
  std::vector<cplx> tmp(std::size_t(start) + 1);
  tmp[std::size_t(start)] = jn;
  for (int n = start; n >= 1; --n) {
    const cplx jm1 = (2.0 * n / z) * jn - jp1;
    jp1 = jn;
    jn = jm1;
    tmp[std::size_t(n - 1)] = jn;
    if (std::abs(jn) > 1e250) {
      for (int m = n - 1; m <= start; ++m) tmp[std::size_t(m)] *= 1e-250;
      jn *= 1e-250;
      jp1 *= 1e-250;
    }
  }
  const cplx j0 = specfun::bessel_j(0, z), j1 = specfun::bessel_j(1, z);
  const cplx scale = std::abs(j0) >= std::abs(j1) ? j0 / tmp[0] : j1 / tmp[1];
  for (int n = 0; n <= nmax; ++n) out[std::size_t(n)] = tmp[std::size_t(n)] * scale;
  return out;
}

// H^(2)_0..H^(2)_nmax(z) by forward recurrence.
inline std::vector<cplx> hankel2_orders(int nmax, cplx z) {
  std::vector<cplx> out(std::size_t(std::max(nmax, 1)) + 1);
  const auto h = specfun::hankel2_pair(z);
  out[0] = h.h0;
  out[1] = h.h1;
  for (int n = 1; n < nmax; ++n) out[std::size_t(n + 1)] = (2.0 * n / z) * out[std::size_t(n)] - out[std::size_t(n - 1)];
  out.resize(std::size_t(nmax) + 1);
  return out;
}

// C_n' = C_{n-1} - (n/z) C_n, C_0' = -C_1. Needs orders up to nmax + 1.
inline cplx derivative(const std::vector<cplx>& c, int n, cplx z) {
  return n == 0 ? -c[1] : c[std::size_t(n - 1)] - (double(n) / z) * c[std::size_t(n)];
}

}  // namespace detail

// Series coefficients a_n, n = 0..N, converged to a relative tail < 1e-12.
inline std::vector<cplx> mie_coefficients(double radius, const Medium& medium, const Medium& background,
                                          double frequency) {
  if (!(radius > 0.0)) throw DomainError("cylinder radius must be > 0");
  if (!(frequency > 0.0)) throw DomainError("frequency must be > 0");
  const double omega = 2.0 * kPi * frequency;
  const cplx k0 = background.wavenumber(omega), k1 = medium.wavenumber(omega);
  const cplx x0 = k0 * radius, x1 = k1 * radius;
  const cplx y0 = k0 / background.mu(), y1 = k1 / medium.mu();
  const int n_terms = int(std::ceil(std::abs(x0))) + 20;
  if (k1 == k0 && y1 == y0) return std::vector<cplx>(std::size_t(n_terms) + 1, cplx{0.0, 0.0});
  for (int nmax = n_terms; nmax <= 10 * n_terms; nmax *= 2) {
    const int top = std::min(nmax, 10 * n_terms);
    const auto J0 = detail::bessel_j_orders(top + 1, x0);
    const auto J1 = detail::bessel_j_orders(top + 1, x1);
    const auto H0 = detail::hankel2_orders(top + 1, x0);
    std::vector<cplx> a(std::size_t(top) + 1);
    double amax = 0.0;
    for (int n = 0; n <= top; ++n) {
      const cplx j1p = detail::derivative(J1, n, x1);
      const cplx num = J0[std::size_t(n)] * y1 * j1p - y0 * detail::derivative(J0, n, x0) * J1[std::size_t(n)];
      const cplx den = H0[std::size_t(n)] * y1 * j1p - y0 * detail::derivative(H0, n, x0) * J1[std::size_t(n)];
      a[std::size_t(n)] = num == cplx{0.0, 0.0} ? cplx{0.0, 0.0} : -num / den;
      amax = std::max(amax, std::abs(a[std::size_t(n)]));
    }
    if (amax == 0.0) return a;
    if (std::abs(a.back()) < 1e-12 * amax) return a;
    if (top == 10 * n_terms) break;
  }
  throw Error("cylinder series did not converge within " + std::to_string(10 * n_terms) + " terms");
}

inline std::vector<double> mie_cylinder_rcs(double radius, const Medium& medium, const Medium& background,
                                            double frequency, std::span<const double> angles) {
  detail::require_lossless(background);
  const auto a = mie_coefficients(radius, medium, background, frequency);
  const double k0 = background.wavenumber(2.0 * kPi * frequency).real();
  std::vector<double> out;
  for (double phi : angles) {
    cplx s = a[0];
    for (std::size_t n = 1; n < a.size(); ++n) s += 2.0 * a[n] * std::cos(double(n) * phi);
    out.push_back(4.0 / k0 * std::norm(s));
  }
  return out;
}

struct PmchwtSolution {
  Vector J_all;  // tangential H (electric current), owner sign, pieces in id order
  Vector M_all;  // E on the contour (magnetic current)
  int n_unknowns = 0;
  double cond_system = std::numeric_limits<double>::quiet_NaN();
  std::vector<Eigen::Index> piece_offset;  // per piece id, plus total

  // Currents restricted to the outer pieces, in scene outer order.
  Vector outer(const Scene& scene, const Vector& all) const {
    const auto ids = scene.outer_pieces();
    Vector v(Eigen::Index(scene.segment_count(ids)));
    Eigen::Index o = 0;
    for (int id : ids) {
      const auto n = Eigen::Index(scene.pieces[id].size());
      v.segment(o, n) = all.segment(piece_offset[std::size_t(id)], n);
      o += n;
    }
    return v;
  }
};

inline Matrix pmchwt_system(const Scene& scene, std::vector<Eigen::Index>& offset, Vector* rhs = nullptr,
                            const Excitation* exc = nullptr) {
  offset.clear();
  Eigen::Index n = 0;
  for (const auto& p : scene.pieces) {
    offset.push_back(n);
    n += Eigen::Index(p.size());
  }
  offset.push_back(n);
  Matrix A = Matrix::Zero(2 * n, 2 * n);
  if (rhs) *rhs = Vector::Zero(2 * n);
  Eigen::Index row = 0;
  for (const auto& obj : scene.objects) {
    const auto kc = KernelConstants::of(obj.medium, scene.omega());
    for (const auto& ra : obj.pieces) {
      const auto& obs = scene.pieces[ra.piece];
      const auto no = Eigen::Index(obs.size());
      for (const auto& rb : obj.pieces) {
        const auto& src = scene.pieces[rb.piece];
        const auto ns = Eigen::Index(src.size());
        const auto pu = assemble_PU(obs.segments, src.segments, rb.normal_sign, kc);
        const Eigen::Index c = offset[std::size_t(rb.piece)];
        A.block(row, c, no, ns) += pu.U;
        A.block(row, n + c, no, ns) -= rb.normal_sign * pu.P;
      }
      A.block(row, offset[std::size_t(ra.piece)], no, no) += assemble_L(obs.segments);
      row += no;
    }
  }
  const auto outer = scene.outer_pieces();
  const auto kb = KernelConstants::of(scene.background, scene.omega());
  for (int a : outer) {
    const auto& obs = scene.pieces[a];
    const auto no = Eigen::Index(obs.size());
    for (int b : outer) {
      const auto& src = scene.pieces[b];
      const auto pu = assemble_PU(obs.segments, src.segments, 1.0, kb);
      const Eigen::Index c = offset[std::size_t(b)];
      A.block(row, c, no, Eigen::Index(src.size())) -= pu.U;
      A.block(row, n + c, no, Eigen::Index(src.size())) += pu.P;
    }
    const Matrix L = assemble_L(obs.segments);
    A.block(row, offset[std::size_t(a)], no, no) += L;
    if (rhs && exc) {
      const auto pts = midpoints(obs.segments);
      rhs->segment(row, no) = 2.0 * L * incident_field(pts, scene.background, scene.omega(), *exc);
    }
    row += no;
  }
  return A;
}

inline PmchwtSolution pmchwt_solve(const Scene& scene, const Excitation& exc, bool compute_cond = true) {
  PmchwtSolution sol;
  Vector rhs;
  const Matrix A = pmchwt_system(scene, sol.piece_offset, &rhs, &exc);
  const Eigen::Index n = sol.piece_offset.back();
  const Vector x = lu_solve(A, rhs, "two-current system");
  sol.M_all = x.head(n);
  sol.J_all = x.tail(n);
  sol.n_unknowns = int(2 * n);
  if (compute_cond) sol.cond_system = cond2(A);
  return sol;
}

inline std::vector<double> pmchwt_rcs(const PmchwtSolution& sol, const Scene& scene, std::span<const double> angles,
                                      double inc_amplitude = 1.0) {
  const SegmentList segs = scene.gather(scene.outer_pieces());
  const Vector J = sol.outer(scene, sol.J_all);
  const Vector E = sol.outer(scene, sol.M_all);
  return echo_width(segs, J, &E, scene.background, scene.omega(), angles, inc_amplitude);
}

inline RcsCurve pmchwt_bistatic(const PmchwtSolution& sol, const Scene& scene, std::span<const double> angles,
                                double inc_amplitude = 1.0) {
  RcsCurve c;
  c.angles.assign(angles.begin(), angles.end());
  c.frequencies = {scene.frequency};
  c.sigma = pmchwt_rcs(sol, scene, angles, inc_amplitude);
  return c;
}

inline double pmchwt_backscatter(const Scene& scene, const Excitation& exc) {
  const auto sol = pmchwt_solve(scene, exc, false);
  const double back = exc.direction_angle() + kPi;
  return pmchwt_rcs(sol, scene, std::span<const double>(&back, 1), std::abs(exc.amplitude))[0];
}

// Exterior total field from the outer E and H:
//   E = E_inc - (omega mu0/4) sum H_n int H0 - (j k0/4) sum E_n int ((r - r').n'/rho) H1.
inline NearField pmchwt_near_field(const PmchwtSolution& sol, const Scene& scene, const Excitation& exc,
                                   std::span<const Vec2> points) {
  const SegmentList segs = scene.gather(scene.outer_pieces());
  const Vector J = sol.outer(scene, sol.J_all);
  const Vector E = sol.outer(scene, sol.M_all);
  const cplx k0 = scene.background.wavenumber(scene.omega());
  const double wmu = scene.omega() * scene.background.mu();
  const cplx j{0.0, 1.0};
  const Vector einc = incident_field(points, scene.background, scene.omega(), exc);
  NearField nf;
  nf.E = Vector(Eigen::Index(points.size()));
  std::vector<char> flags(points.size(), 0);
  parallel_for(points.size(), [&](std::size_t p) {
    const Vec2 r = points[p];
    if (detail::too_close(r, segs)) {
      flags[p] = 1;
      nf.E(Eigen::Index(p)) = cplx(std::numeric_limits<double>::quiet_NaN(), 0.0);
      return;
    }
    cplx acc{0.0, 0.0};
    for (std::size_t s = 0; s < segs.size(); ++s) {
      const auto i = Eigen::Index(s);
      const Vec2 nrm = segs[s].normal;
      acc += -0.25 * wmu * J(i) * detail::segment_integral(r, segs[s], [&](Vec2 q) {
               return specfun::hankel2(0, k0 * norm(r - q));
             });
      acc += -0.25 * j * k0 * E(i) * detail::segment_integral(r, segs[s], [&](Vec2 q) {
               const Vec2 d = r - q;
               const double rho = norm(d);
               return (dot(d, nrm) / rho) * specfun::hankel2(1, k0 * rho);
             });
    }
    nf.E(Eigen::Index(p)) = einc(Eigen::Index(p)) + acc;
  });
  nf.flagged.assign(points.size(), false);
  for (std::size_t p = 0; p < points.size(); ++p) nf.flagged[p] = flags[p] != 0;
  return nf;
}

}  // namespace ssie2d

#endif  // SSIE2D_REFERENCE_HPP
