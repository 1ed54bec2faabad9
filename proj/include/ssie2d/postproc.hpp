#ifndef SSIE2D_POSTPROC_HPP
#define SSIE2D_POSTPROC_HPP

// Echo width, near fields and error metrics.
//
// With G0 = -(j/4) H0(k0 rho) and H0(x) ~ sqrt(2j/(pi x)) exp(-jx), the field
// radiated by a line current J on the contour behaves as
//   E_s ~ -(j/4) sqrt(2j/(pi k0 r)) exp(-j k0 r) F(phi),
//   F(phi) = -j omega mu0 sum_n J_n l_n exp(j k0 rhat . m_n),
// so that sigma = 2 pi r |E_s|^2 / |E0|^2 = |F|^2 / (4 k0 |E0|^2).

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ssie2d/assembly.hpp"
#include "ssie2d/config.hpp"
#include "ssie2d/geometry.hpp"
#include "ssie2d/linalg.hpp"
#include "ssie2d/parallel.hpp"
#include "ssie2d/quadrature.hpp"
#include "ssie2d/solver.hpp"
#include "ssie2d/specfun.hpp"

namespace ssie2d {

enum class RcsKind { Bistatic, Monostatic };

struct RcsCurve {
  RcsKind kind = RcsKind::Bistatic;
  std::vector<double> angles;       // rad; observation (bistatic) or backscatter (monostatic)
  std::vector<double> frequencies;  // one entry for bistatic
  std::vector<double> sigma;        // echo width, m
  std::vector<std::string> errors;  // monostatic: per-frequency failure message, empty if fine

  std::size_t size() const { return sigma.size(); }
  bool ok(std::size_t i) const { return errors.empty() || errors[i].empty(); }

  static double to_db(double s) {
    return s > 0.0 ? 10.0 * std::log10(s) : -std::numeric_limits<double>::infinity();
  }
  std::vector<double> sigma_db() const {
    std::vector<double> out;
    for (double s : sigma) out.push_back(to_db(s));
    return out;
  }
};

inline std::vector<double> angles_deg_to_rad(std::span<const double> deg) {
  std::vector<double> out;
  for (double d : deg) out.push_back(d * kPi / 180.0);
  return out;
}

// N equally spaced values from a to b inclusive.
inline std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> out;
  if (n == 1) return {a};
  for (std::size_t i = 0; i < n; ++i) out.push_back(a + (b - a) * double(i) / double(n - 1));
  return out;
}

namespace detail {

inline void require_lossless(const Medium& background) {
  if (!background.lossless()) throw DomainError("echo width is undefined in a lossy background");
}

}  // namespace detail

// Far-field echo width of electric (J) and optional magnetic-type (E on the
// contour, normals out of the scatterer) sources.
inline std::vector<double> echo_width(std::span<const Segment> segs, const Vector& J, const Vector* E_surface,
                                      const Medium& background, double omega, std::span<const double> angles,
                                      double inc_amplitude) {
  detail::require_lossless(background);
  if (J.size() != Eigen::Index(segs.size())) throw DomainError("echo width: current length mismatch");
  if (!(inc_amplitude > 0.0)) throw DomainError("echo width: incident amplitude must be nonzero");
  const double k0 = background.wavenumber(omega).real();
  const double wmu = omega * background.mu();
  const cplx j{0.0, 1.0};
  std::vector<double> sigma(angles.size());
  parallel_for(angles.size(), [&](std::size_t a) {
    const Vec2 rhat{std::cos(angles[a]), std::sin(angles[a])};
    cplx f{0.0, 0.0};
    for (std::size_t n = 0; n < segs.size(); ++n) {
      const auto i = Eigen::Index(n);
      cplx src = -j * wmu * J(i);
      if (E_surface) src += j * k0 * dot(segs[n].normal, rhat) * (*E_surface)(i);
      f += segs[n].length * src * std::exp(j * k0 * dot(rhat, segs[n].midpoint));
    }
    sigma[a] = std::norm(f) / (4.0 * k0 * inc_amplitude * inc_amplitude);
  });
  return sigma;
}

inline RcsCurve bistatic_rcs(const Vector& J, std::span<const Segment> outer_segments, const Medium& background,
                             double omega, std::span<const double> angles, double inc_amplitude) {
  RcsCurve c;
  c.kind = RcsKind::Bistatic;
  c.angles.assign(angles.begin(), angles.end());
  c.frequencies = {omega / (2.0 * kPi)};
  c.sigma = echo_width(outer_segments, J, nullptr, background, omega, angles, inc_amplitude);
  return c;
}

// RE = sum |calc - ref|^2 / sum |ref|^2 over points valid in both curves.
inline double relative_error_rcs(const RcsCurve& calc, const RcsCurve& ref) {
  if (calc.size() != ref.size() || calc.angles != ref.angles || calc.frequencies != ref.frequencies)
    throw DomainError("relative_error_rcs: curves are on different grids");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < calc.size(); ++i) {
    if (!calc.ok(i) || !ref.ok(i)) continue;
    num += (calc.sigma[i] - ref.sigma[i]) * (calc.sigma[i] - ref.sigma[i]);
    den += ref.sigma[i] * ref.sigma[i];
  }
  if (den == 0.0) throw DomainError("relative_error_rcs: reference is identically zero");
  return num / den;
}

// Monostatic sweep with a pluggable per-frequency solver returning the
// backscatter echo width. Failures are recorded per frequency.
using BackscatterFn = std::function<double(const Scene&, const Excitation&)>;

inline RcsCurve monostatic_sweep(const SceneConfig& scene_template, double f_start, double f_end,
                                 std::size_t n_points, const Excitation& exc, const BackscatterFn& backscatter) {
  if (n_points < 2) throw DomainError("monostatic sweep needs at least 2 frequencies");
  if (!(f_start > 0.0) || !(f_end > f_start)) throw DomainError("monostatic sweep needs 0 < f_start < f_end");
  RcsCurve c;
  c.kind = RcsKind::Monostatic;
  c.frequencies = linspace(f_start, f_end, n_points);
  c.angles.assign(n_points, exc.direction_angle() + kPi);
  c.sigma.assign(n_points, std::numeric_limits<double>::quiet_NaN());
  c.errors.assign(n_points, {});
  for (std::size_t i = 0; i < n_points; ++i) {
    try {
      const Scene scene = build_scene(with_frequency(scene_template, c.frequencies[i]));
      c.sigma[i] = backscatter(scene, exc);
    } catch (const std::exception& e) {
      c.errors[i] = e.what();
      if (c.errors[i].empty()) c.errors[i] = "failed";
    }
  }
  return c;
}

inline double ssie_backscatter(const Scene& scene, const Excitation& exc) {
  const auto s = solve_scene(scene, exc);
  const double back = exc.direction_angle() + kPi;
  return echo_width(s.outer_segments, s.out.J_outer, nullptr, scene.background, scene.omega(),
                    std::span<const double>(&back, 1), std::abs(exc.amplitude))[0];
}

inline RcsCurve monostatic_sweep(const SceneConfig& scene_template, double f_start, double f_end,
                                 std::size_t n_points, const Excitation& exc) {
  return monostatic_sweep(scene_template, f_start, f_end, n_points, exc, ssie_backscatter);
}

// Near fields.

struct NearField {
  Vector E;                   // NaN where flagged
  std::vector<bool> flagged;  // inside, or closer than one segment length to the contour
  std::size_t n_flagged() const {
    std::size_t n = 0;
    for (bool f : flagged) n += f;
    return n;
  }
};

namespace detail {

inline double point_segment_distance(Vec2 p, const Segment& s) {
  const Vec2 d = s.end - s.start;
  double t = dot(p - s.start, d) / dot(d, d);
  t = std::clamp(t, 0.0, 1.0);
  return norm(p - (s.start + t * d));
}

// Winding number of the closed outer contour around p.
inline double winding(Vec2 p, std::span<const Segment> segs) {
  double w = 0.0;
  for (const auto& s : segs) {
    const Vec2 a = s.start - p, b = s.end - p;
    w += std::atan2(cross(a, b), dot(a, b));
  }
  return w / (2.0 * kPi);
}

inline bool too_close(Vec2 p, std::span<const Segment> segs) {
  if (std::abs(winding(p, segs)) > 0.5) return true;
  for (const auto& s : segs)
    if (point_segment_distance(p, s) <= s.length) return true;
  return false;
}

// int_seg f(r') dr' with midpoint or 4-point Gauss depending on distance.
template <class F>
cplx segment_integral(Vec2 r, const Segment& s, F&& f) {
  if (norm(r - s.midpoint) > 3.0 * s.length) return s.length * f(s.midpoint);
  const auto& g = gauss4();
  cplx acc{0.0, 0.0};
  for (std::size_t q = 0; q < g.size(); ++q) acc += 0.5 * s.length * g.weights[q] * f(s.at(g.nodes[q]));
  return acc;
}

}  // namespace detail

// Total field E_inc - (omega mu0 / 4) sum_n J_n int_n H0(k0 |r - r'|) dr'.
inline NearField near_field(const Vector& J, std::span<const Segment> outer_segments, const Medium& background,
                            double omega, const Excitation& exc, std::span<const Vec2> points) {
  if (J.size() != Eigen::Index(outer_segments.size())) throw DomainError("near_field: current length mismatch");
  const cplx k0 = background.wavenumber(omega);
  const double wmu = omega * background.mu();
  const Vector einc = incident_field(points, background, omega, exc);
  NearField nf;
  nf.E = Vector(Eigen::Index(points.size()));
  nf.flagged.assign(points.size(), false);
  std::vector<char> flags(points.size(), 0);
  parallel_for(points.size(), [&](std::size_t p) {
    const Vec2 r = points[p];
    if (detail::too_close(r, outer_segments)) {
      flags[p] = 1;
      nf.E(Eigen::Index(p)) = cplx(std::numeric_limits<double>::quiet_NaN(), 0.0);
      return;
    }
    cplx es{0.0, 0.0};
    for (std::size_t n = 0; n < outer_segments.size(); ++n) {
      es += J(Eigen::Index(n)) * detail::segment_integral(r, outer_segments[n], [&](Vec2 q) {
              return specfun::hankel2(0, k0 * norm(r - q));
            });
    }
    nf.E(Eigen::Index(p)) = einc(Eigen::Index(p)) - 0.25 * wmu * es;
  });
  for (std::size_t p = 0; p < points.size(); ++p) nf.flagged[p] = flags[p] != 0;
  return nf;
}

// |calc - ref| / |ref| element-wise; NaN where ref is zero or either is NaN.
inline std::vector<double> near_field_relative_error(const Vector& calc, const Vector& ref) {
  if (calc.size() != ref.size()) throw DomainError("near_field_relative_error: size mismatch");
  std::vector<double> out(std::size_t(calc.size()));
  for (Eigen::Index i = 0; i < calc.size(); ++i) {
    const double r = std::abs(ref(i));
    out[std::size_t(i)] = r == 0.0 ? std::numeric_limits<double>::quiet_NaN() : std::abs(calc(i) - ref(i)) / r;
  }
  return out;
}

// Median of the finite entries.
inline double finite_median(std::vector<double> v) {
  std::erase_if(v, [](double x) { return !std::isfinite(x); });
  if (v.empty()) throw DomainError("median of an empty set");
  const auto mid = v.begin() + std::ptrdiff_t(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2) return *mid;
  const double hi = *mid;
  return 0.5 * (hi + *std::max_element(v.begin(), mid));
}

}  // namespace ssie2d

#endif  // SSIE2D_POSTPROC_HPP
