#ifndef SSIE2D_ASSEMBLY_HPP
#define SSIE2D_ASSEMBLY_HPP

// Tested boundary operators for pulse basis / collocation-Galerkin testing:
//
//   L_ii  = l_i
//   P_ij  = l_i int_j (omega mu / 2) H0(k |m_i - r'|) dr'
//   U_ij  = l_i int_j (j k / 2) ((r' - m_i) . n') / rho  H1(k rho) dr'
//
// so that an object satisfies (L + U) E = P H with H = (1/(j omega mu)) dE/dn.
// The source integral uses the midpoint rule beyond two source lengths and
// 4-point Gauss-Legendre inside; the P self entry integrates the logarithm
// analytically and the smooth remainder numerically. U self entries vanish.

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "ssie2d/config.hpp"
#include "ssie2d/geometry.hpp"
#include "ssie2d/linalg.hpp"
#include "ssie2d/parallel.hpp"
#include "ssie2d/quadrature.hpp"
#include "ssie2d/specfun.hpp"

namespace ssie2d {

enum class Kernel { L, P, U, Phat };

inline const char* kernel_name(Kernel k) {
  switch (k) {
    case Kernel::L: return "L";
    case Kernel::P: return "P";
    case Kernel::U: return "U";
    case Kernel::Phat: return "Phat";
  }
  return "?";
}

struct OperatorBlock {
  std::vector<int> rows;  // piece ids, concatenated in order
  std::vector<int> cols;
  Matrix data;
  Kernel kernel = Kernel::P;
  Medium medium;
};

// Kernel constants of one medium at one frequency.
struct KernelConstants {
  cplx k;
  double omega_mu = 0.0;

  static KernelConstants of(const Medium& m, double omega) {
    if (!(omega > 0.0)) throw DomainError("angular frequency must be > 0");
    return {m.wavenumber(omega), omega * m.mu()};
  }
};

namespace detail {

inline constexpr double kGammaE = 1.7810724179901979;  // exp(Euler gamma)
inline constexpr double kNearFactor = 2.0;

enum class Pair { Self, Near, Far };

inline Pair classify(const Segment& obs, const Segment& src) {
  const double d = norm(obs.midpoint - src.midpoint);
  const double tol = 1e-9 * std::min(obs.length, src.length);
  if (d <= tol) {
    const bool same = (norm(obs.start - src.start) <= tol && norm(obs.end - src.end) <= tol) ||
                      (norm(obs.start - src.end) <= tol && norm(obs.end - src.start) <= tol);
    if (!same) throw ValidationError("distinct segments share a midpoint (invalid mesh)");
    return Pair::Self;
  }
  return d > kNearFactor * src.length ? Pair::Far : Pair::Near;
}

// int_{-l/2}^{l/2} H0(k|t|) dt
inline cplx self_h0_integral(double l, cplx k) {
  const cplx j{0.0, 1.0};
  const double two_over_pi = 2.0 / kPi;
  const cplx analytic = l * (1.0 - j * two_over_pi * (std::log(kGammaE * k * l / 4.0) - 1.0));
  // H0(x) - (1 - j(2/pi) ln(gamma_e x / 2)) is O(x^2 ln x): Gauss on [0, l/2].
  const auto& g = gauss16();
  cplx rem{0.0, 0.0};
  const double half = 0.25 * l;
  for (std::size_t q = 0; q < g.size(); ++q) {
    const double t = half * (g.nodes[q] + 1.0);
    const cplx x = k * t;
    const cplx h0 = specfun::hankel2_pair(x).h0;
    rem += g.weights[q] * (h0 - (1.0 - j * two_over_pi * std::log(kGammaE * x / 2.0)));
  }
  return analytic + 2.0 * half * rem;
}

struct PU {
  cplx p;
  cplx u;
};

// Single tested entry pair. `nsrc` is the source normal used by U.
inline PU entry(const Segment& obs, const Segment& src, Vec2 nsrc, const KernelConstants& kc, bool want_u) {
  const cplx j{0.0, 1.0};
  const Vec2 r = obs.midpoint;
  PU out{};
  switch (classify(obs, src)) {
    case Pair::Self:
      out.p = 0.5 * kc.omega_mu * obs.length * self_h0_integral(src.length, kc.k);
      out.u = 0.0;
      return out;
    case Pair::Far: {
      const Vec2 d = src.midpoint - r;
      const double rho = norm(d);
      const auto h = specfun::hankel2_pair(kc.k * rho);
      const double w = obs.length * src.length;
      out.p = 0.5 * kc.omega_mu * w * h.h0;
      if (want_u) out.u = 0.5 * j * kc.k * w * (dot(d, nsrc) / rho) * h.h1;
      return out;
    }
    case Pair::Near: {
      const auto& g = gauss4();
      cplx sp{0.0, 0.0}, su{0.0, 0.0};
      for (std::size_t q = 0; q < g.size(); ++q) {
        const Vec2 d = src.at(g.nodes[q]) - r;
        const double rho = norm(d);
        const double w = 0.5 * src.length * g.weights[q];
        if (want_u) {
          const auto h = specfun::hankel2_pair(kc.k * rho);
          sp += w * h.h0;
          su += w * (dot(d, nsrc) / rho) * h.h1;
        } else {
          sp += w * specfun::hankel2(0, kc.k * rho);
        }
      }
      out.p = 0.5 * kc.omega_mu * obs.length * sp;
      out.u = 0.5 * j * kc.k * obs.length * su;
      return out;
    }
  }
  return out;
}

}  // namespace detail

inline Matrix assemble_L(std::span<const Segment> segs) {
  Matrix m = Matrix::Zero(Eigen::Index(segs.size()), Eigen::Index(segs.size()));
  for (std::size_t i = 0; i < segs.size(); ++i) m(Eigen::Index(i), Eigen::Index(i)) = segs[i].length;
  return m;
}

struct PUBlocks {
  Matrix P;
  Matrix U;
};

// P and U between two segment lists in one sweep. Source normals are the
// stored ones times `src_normal_sign` (which must make them point out of the
// object whose medium is used).
inline PUBlocks assemble_PU(std::span<const Segment> obs, std::span<const Segment> src, double src_normal_sign,
                            const KernelConstants& kc, bool want_u = true) {
  const auto n = Eigen::Index(obs.size());
  const auto m = Eigen::Index(src.size());
  PUBlocks out{Matrix(n, m), want_u ? Matrix(n, m) : Matrix()};
  parallel_for(obs.size(), [&](std::size_t i) {
    for (std::size_t jj = 0; jj < src.size(); ++jj) {
      const auto e = detail::entry(obs[i], src[jj], src_normal_sign * src[jj].normal, kc, want_u);
      out.P(Eigen::Index(i), Eigen::Index(jj)) = e.p;
      if (want_u) out.U(Eigen::Index(i), Eigen::Index(jj)) = e.u;
    }
  });
  return out;
}

inline Matrix assemble_P(std::span<const Segment> obs, std::span<const Segment> src, const KernelConstants& kc) {
  return assemble_PU(obs, src, 1.0, kc, false).P;
}

inline Matrix assemble_U(std::span<const Segment> obs, std::span<const Segment> src, double src_normal_sign,
                         const KernelConstants& kc) {
  return assemble_PU(obs, src, src_normal_sign, kc, true).U;
}

// Exterior propagator: the scattered field at outer midpoints due to a
// current J on the outer boundary is Phat J, i.e. Phat = -(1/2) L^-1 P0.
inline Matrix assemble_Phat(std::span<const Segment> outer, const KernelConstants& background) {
  Matrix p0 = assemble_P(outer, outer, background);
  for (std::size_t i = 0; i < outer.size(); ++i) p0.row(Eigen::Index(i)) *= -0.5 / outer[i].length;
  return p0;
}

// Piece-level forms.

inline OperatorBlock assemble_L(const BoundaryPiece& piece) {
  if (piece.segments.empty()) throw DomainError("piece " + std::to_string(piece.id) + " is empty");
  return {{piece.id}, {piece.id}, assemble_L(piece.segments), Kernel::L, {}};
}

inline OperatorBlock assemble_P(const BoundaryPiece& obs, const BoundaryPiece& src, const Medium& medium,
                                double omega) {
  return {{obs.id}, {src.id}, assemble_P(obs.segments, src.segments, KernelConstants::of(medium, omega)),
          Kernel::P, medium};
}

inline OperatorBlock assemble_U(const BoundaryPiece& obs, const BoundaryPiece& src, const Medium& medium,
                                double omega, double src_normal_sign = 1.0) {
  return {{obs.id},
          {src.id},
          assemble_U(obs.segments, src.segments, src_normal_sign, KernelConstants::of(medium, omega)),
          Kernel::U,
          medium};
}

inline OperatorBlock assemble_Phat(const std::vector<const BoundaryPiece*>& outer, const Medium& background,
                                   double omega) {
  std::vector<int> ids;
  SegmentList segs;
  for (const auto* p : outer) {
    if (p->shared()) throw DomainError("assemble_Phat: piece " + std::to_string(p->id) + " is not an outer piece");
    ids.push_back(p->id);
    segs.insert(segs.end(), p->segments.begin(), p->segments.end());
  }
  return {ids, ids, assemble_Phat(segs, KernelConstants::of(background, omega)), Kernel::Phat, background};
}

inline OperatorBlock assemble_Phat(const Scene& scene) {
  std::vector<const BoundaryPiece*> outer;
  for (int id : scene.outer_pieces()) outer.push_back(&scene.pieces[id]);
  return assemble_Phat(outer, scene.background, scene.omega());
}

// amplitude exp(-j k0 direction . r) at each point.
inline Vector incident_field(std::span<const Vec2> points, const Medium& background, double omega,
                             const Excitation& exc) {
  if (std::abs(norm(exc.direction) - 1.0) > 1e-12) throw DomainError("excitation direction must be a unit vector");
  const cplx k0 = background.wavenumber(omega);
  const cplx j{0.0, 1.0};
  Vector e(Eigen::Index(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i)
    e(Eigen::Index(i)) = exc.amplitude * std::exp(-j * k0 * dot(exc.direction, points[i]));
  return e;
}

inline std::vector<Vec2> midpoints(std::span<const Segment> segs) {
  std::vector<Vec2> out;
  out.reserve(segs.size());
  for (const auto& s : segs) out.push_back(s.midpoint);
  return out;
}

}  // namespace ssie2d

#endif  // SSIE2D_ASSEMBLY_HPP
