#ifndef SSIE2D_SOLVER_HPP
#define SSIE2D_SOLVER_HPP

// Exterior problem on the outer contour:
//   (I - Phat Ys) E = E_inc,   J = Ys E.

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <string>

#include "ssie2d/assembly.hpp"
#include "ssie2d/linalg.hpp"
#include "ssie2d/operator.hpp"

namespace ssie2d {

struct SolveOutput {
  Vector E_outer;
  Vector J_outer;
  std::string scene_digest;
  double frequency = 0.0;
  double cond_final = 1.0;
  double residual = 0.0;  // ||(I - Phat Ys) E - E_inc|| / ||E_inc||
};

// FNV-1a over media, frequency and segment coordinates.
inline std::string scene_digest(const Scene& scene) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&](double v) {
    unsigned char b[sizeof v];
    std::memcpy(b, &v, sizeof v);
    for (unsigned char c : b) {
      h ^= c;
      h *= 1099511628211ull;
    }
  };
  auto mix_medium = [&](const Medium& m) {
    mix(m.eps_rel);
    mix(m.sigma);
    mix(m.mu_rel);
  };
  mix(scene.frequency);
  mix_medium(scene.background);
  for (const auto& o : scene.objects) {
    mix_medium(o.medium);
    for (const auto& r : o.pieces) {
      mix(double(r.piece));
      mix(r.normal_sign);
    }
  }
  for (const auto& p : scene.pieces)
    for (const auto& s : p.segments) {
      mix(s.start.x);
      mix(s.start.y);
      mix(s.end.x);
      mix(s.end.y);
    }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline SolveOutput solve_exterior(const SurfaceOperator& Ys, const OperatorBlock& Phat, const Vector& E_inc) {
  const Eigen::Index n = Ys.matrix.rows();
  if (Ys.matrix.cols() != n || Phat.data.rows() != n || Phat.data.cols() != n || E_inc.size() != n)
    throw DomainError("solve_exterior: dimensions do not conform");
  const Matrix A = Matrix::Identity(n, n) - Phat.data * Ys.matrix;
  SolveOutput out;
  out.E_outer = lu_solve(A, E_inc, "I - Phat Ys");
  out.J_outer = Ys.matrix * out.E_outer;
  out.cond_final = cond2(A);
  const double einc = E_inc.norm();
  out.residual = einc > 0.0 ? (A * out.E_outer - E_inc).norm() / einc : 0.0;
  return out;
}

// Everything needed downstream of one frequency point.
struct SceneSolution {
  SolveOutput out;
  SegmentList outer_segments;
  CondLog cond;
};

inline SceneSolution solve_scene(const Scene& scene, const Excitation& exc, bool log_cond = false) {
  SceneSolution s;
  CondLog* log = log_cond ? &s.cond : nullptr;
  const auto Y = build_Y(scene, log);
  const auto Yhat = build_Yhat(scene, log);
  const auto Ys = build_Ys(Y, Yhat);
  const auto Phat = assemble_Phat(scene);
  s.outer_segments = scene.gather(scene.outer_pieces());
  const auto pts = midpoints(s.outer_segments);
  const Vector einc = incident_field(pts, scene.background, scene.omega(), exc);
  s.out = solve_exterior(Ys, Phat, einc);
  s.out.scene_digest = scene_digest(scene);
  s.out.frequency = scene.frequency;
  if (log) log->push_back({"I - Phat Ys", Ys.matrix.rows(), s.out.cond_final});
  return s;
}

}  // namespace ssie2d

#endif  // SSIE2D_SOLVER_HPP
