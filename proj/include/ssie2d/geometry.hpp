#ifndef SSIE2D_GEOMETRY_HPP
#define SSIE2D_GEOMETRY_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ssie2d/errors.hpp"

namespace ssie2d {

using cplx = std::complex<double>;

inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kMu0 = 4.0e-7 * std::numbers::pi;
inline constexpr double kEps0 = 1.0 / (kMu0 * kSpeedOfLight * kSpeedOfLight);
inline constexpr double kPi = std::numbers::pi;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
  friend bool operator==(Vec2, Vec2) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

// Homogeneous, isotropic medium.
struct Medium {
  double eps_rel = 1.0;
  double sigma = 0.0;  // S/m
  double mu_rel = 1.0;

  double mu() const { return kMu0 * mu_rel; }
  bool lossless() const { return sigma == 0.0; }

  // Complex relative permittivity eps_rel - j sigma/(omega eps0).
  cplx eps_complex(double omega) const { return {eps_rel, -sigma / (omega * kEps0)}; }

  // k = omega sqrt(mu eps0 eps_c); principal root gives Re(k) > 0, Im(k) <= 0.
  cplx wavenumber(double omega) const {
    return omega * std::sqrt(mu() * kEps0 * eps_complex(omega));
  }

  friend bool operator==(const Medium&, const Medium&) = default;
};

// Throws ValidationError naming `key` if the medium is not physical.
inline void validate_medium(const Medium& m, const std::string& key) {
  if (!std::isfinite(m.eps_rel) || !std::isfinite(m.sigma) || !std::isfinite(m.mu_rel))
    throw ValidationError("medium parameters must be finite", key);
  if (m.eps_rel <= 0.0) throw ValidationError("eps_rel must be > 0", key);
  if (m.sigma < 0.0) throw ValidationError("sigma must be >= 0", key);
  if (m.mu_rel <= 0.0) throw ValidationError("mu_rel must be > 0", key);
}

// Straight boundary element. `normal` is the right-hand normal of
// (end - start); with counterclockwise traversal it points out of the object.
struct Segment {
  Vec2 start;
  Vec2 end;
  Vec2 midpoint;
  double length = 0.0;
  Vec2 normal;

  static Segment between(Vec2 a, Vec2 b) {
    Segment s;
    s.start = a;
    s.end = b;
    s.midpoint = 0.5 * (a + b);
    const Vec2 t = b - a;
    s.length = norm(t);
    s.normal = {t.y / s.length, -t.x / s.length};
    return s;
  }

  Segment reversed() const { return between(end, start); }

  // Point at local parameter u in [-1, 1].
  Vec2 at(double u) const { return midpoint + (0.5 * u) * (end - start); }
};

using SegmentList = std::vector<Segment>;

namespace detail {

inline std::size_t segment_count(double length, double h_target) {
  // Guards against 2.0/0.05 = 40.000000000000007 rounding up to 41.
  return static_cast<std::size_t>(std::ceil(length / h_target * (1.0 - 1e-12)));
}

}  // namespace detail

// Splits every polyline edge into ceil(edge/h_target) equal segments.
inline SegmentList discretize_polyline(std::span<const Vec2> vertices, double h_target) {
  if (vertices.size() < 2) throw ValidationError("polyline needs at least 2 vertices");
  if (!(h_target > 0.0)) throw ValidationError("h_target must be > 0");
  SegmentList out;
  for (std::size_t e = 0; e + 1 < vertices.size(); ++e) {
    const Vec2 a = vertices[e];
    const Vec2 b = vertices[e + 1];
    const double len = norm(b - a);
    if (!(len > 0.0)) throw ValidationError("degenerate zero-length polyline edge " + std::to_string(e));
    const std::size_t n = std::max<std::size_t>(1, detail::segment_count(len, h_target));
    Vec2 prev = a;
    for (std::size_t i = 1; i <= n; ++i) {
      const Vec2 next = (i == n) ? b : a + (double(i) / double(n)) * (b - a);
      out.push_back(Segment::between(prev, next));
      prev = next;
    }
  }
  return out;
}

// Chords of a circular arc traversed from angle_start to angle_end (radians);
// normals point away from the center.
inline SegmentList discretize_arc(Vec2 center, double radius, double angle_start, double angle_end,
                                  double h_target) {
  if (!(radius > 0.0)) throw ValidationError("arc radius must be > 0");
  if (!(angle_end > angle_start)) throw ValidationError("arc needs angle_end > angle_start");
  if (!(h_target > 0.0)) throw ValidationError("h_target must be > 0");
  const double arc = radius * (angle_end - angle_start);
  const std::size_t n = std::max<std::size_t>(1, detail::segment_count(arc, h_target));
  auto point = [&](std::size_t i) {
    const double t = angle_start + (angle_end - angle_start) * double(i) / double(n);
    return Vec2{center.x + radius * std::cos(t), center.y + radius * std::sin(t)};
  };
  SegmentList out;
  out.reserve(n);
  Vec2 prev = point(0);
  for (std::size_t i = 1; i <= n; ++i) {
    const Vec2 next = point(i);
    out.push_back(Segment::between(prev, next));
    prev = next;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Scene description

struct Primitive {
  enum class Kind { Polyline, Arc };
  Kind kind = Kind::Polyline;
  std::vector<Vec2> points;  // polyline
  Vec2 center;               // arc
  double radius = 0.0;
  double angle_start_deg = 0.0;
  double angle_end_deg = 0.0;

  static Primitive polyline(std::vector<Vec2> pts) {
    Primitive p;
    p.kind = Kind::Polyline;
    p.points = std::move(pts);
    return p;
  }
  static Primitive arc(Vec2 c, double r, double a0_deg, double a1_deg) {
    Primitive p;
    p.kind = Kind::Arc;
    p.center = c;
    p.radius = r;
    p.angle_start_deg = a0_deg;
    p.angle_end_deg = a1_deg;
    return p;
  }
};

inline SegmentList discretize(const Primitive& p, double h_target) {
  if (p.kind == Primitive::Kind::Polyline) return discretize_polyline(p.points, h_target);
  return discretize_arc(p.center, p.radius, p.angle_start_deg * kPi / 180.0,
                        p.angle_end_deg * kPi / 180.0, h_target);
}

struct ObjectConfig {
  std::string name;
  Medium medium;
  std::vector<Primitive> contour;  // boundary portions facing the background
};

struct SharedConfig {
  std::string object_a;
  std::string object_b;
  Primitive primitive;
};

struct SceneConfig {
  double frequency_hz = 0.0;
  Medium background;
  std::vector<ObjectConfig> objects;
  std::vector<SharedConfig> shared;
  double h_target_m = 0.0;
};

enum class PieceKind { Outer, Shared };

// A connected run of segments. Segments are stored in the counterclockwise
// order of `owner`, so stored normals point out of `owner`; for a shared
// piece the other object sees the same segments with negated normals.
struct BoundaryPiece {
  int id = 0;
  PieceKind kind = PieceKind::Outer;
  int owner = 0;     // the outer object, or object_a of a shared piece
  int neighbor = -1; // object_b of a shared piece
  SegmentList segments;

  std::size_t size() const { return segments.size(); }
  bool shared() const { return kind == PieceKind::Shared; }
};

struct PieceRef {
  int piece = 0;
  double normal_sign = 1.0;  // +1 if stored normals point out of this object
};

struct SceneObject {
  std::string name;
  Medium medium;
  std::vector<PieceRef> pieces;  // counterclockwise traversal order
};

struct Scene {
  Medium background;
  std::vector<SceneObject> objects;
  std::vector<BoundaryPiece> pieces;
  double frequency = 0.0;

  double omega() const { return 2.0 * kPi * frequency; }
  double wavelength() const { return kSpeedOfLight / frequency; }

  // Outer pieces in (object, traversal) order; this fixes the row/column
  // order of every surface operator.
  std::vector<int> outer_pieces() const {
    std::vector<int> out;
    for (const auto& obj : objects)
      for (const auto& ref : obj.pieces)
        if (!pieces[ref.piece].shared()) out.push_back(ref.piece);
    return out;
  }

  std::vector<int> shared_pieces() const {
    std::vector<int> out;
    for (const auto& p : pieces)
      if (p.shared()) out.push_back(p.id);
    return out;
  }

  std::size_t segment_count(std::span<const int> ids) const {
    std::size_t n = 0;
    for (int id : ids) n += pieces[id].size();
    return n;
  }

  std::size_t total_segments() const {
    std::size_t n = 0;
    for (const auto& p : pieces) n += p.size();
    return n;
  }

  // Concatenated segments of the given pieces, normals as stored.
  SegmentList gather(std::span<const int> ids) const {
    SegmentList out;
    for (int id : ids) out.insert(out.end(), pieces[id].segments.begin(), pieces[id].segments.end());
    return out;
  }

  int object_index(const std::string& name) const {
    for (std::size_t i = 0; i < objects.size(); ++i)
      if (objects[i].name == name) return int(i);
    return -1;
  }

  double normal_sign(int object, int piece) const {
    for (const auto& r : objects[object].pieces)
      if (r.piece == piece) return r.normal_sign;
    throw Error("piece " + std::to_string(piece) + " does not bound object " + std::to_string(object));
  }
};

// Interface graph edge: the shared piece between two objects.
struct InterfaceEdge {
  int object_a;
  int object_b;
  int piece;
};

inline std::vector<InterfaceEdge> interface_edges(const Scene& scene) {
  std::vector<InterfaceEdge> out;
  for (const auto& p : scene.pieces)
    if (p.shared()) out.push_back({p.owner, p.neighbor, p.id});
  return out;
}

namespace detail {

inline bool same_point(Vec2 a, Vec2 b, double tol) { return norm(a - b) <= tol; }

// Proper or touching intersection of two closed segments.
inline bool segments_intersect(const Segment& s, const Segment& t, double tol) {
  const Vec2 d1 = s.end - s.start;
  const Vec2 d2 = t.end - t.start;
  const double denom = cross(d1, d2);
  const Vec2 w = t.start - s.start;
  if (std::abs(denom) <= tol * (norm(d1) + norm(d2))) {
    // parallel: overlap only if collinear and projections overlap
    if (std::abs(cross(w, d1)) > tol * norm(d1)) return false;
    const double l2 = dot(d1, d1);
    const double a = dot(t.start - s.start, d1) / l2;
    const double b = dot(t.end - s.start, d1) / l2;
    const double lo = std::min(a, b), hi = std::max(a, b);
    const double rel = tol / std::sqrt(l2);
    return hi > rel && lo < 1.0 - rel;
  }
  const double u = cross(w, d2) / denom;
  const double v = cross(w, d1) / denom;
  const double eps = 1e-9;
  return u > -eps && u < 1.0 + eps && v > -eps && v < 1.0 + eps;
}

inline double signed_area(std::span<const Segment> loop) {
  double a = 0.0;
  for (const auto& s : loop) a += cross(s.start, s.end);
  return 0.5 * a;
}

inline SegmentList reversed(const SegmentList& segs) {
  SegmentList out;
  out.reserve(segs.size());
  for (auto it = segs.rbegin(); it != segs.rend(); ++it) out.push_back(it->reversed());
  return out;
}

struct ChainLink {
  int piece;
  bool forward;  // traversed in stored order
};

}  // namespace detail

// Builds and validates a Scene from its configuration.
inline Scene build_scene(const SceneConfig& cfg) {
  if (!(cfg.frequency_hz > 0.0)) throw ValidationError("must be > 0", "frequency_hz");
  if (!(cfg.h_target_m > 0.0)) throw ValidationError("must be > 0", "h_target_m");
  validate_medium(cfg.background, "background");
  if (cfg.objects.empty()) throw ValidationError("at least one object required", "objects");

  Scene scene;
  scene.background = cfg.background;
  scene.frequency = cfg.frequency_hz;

  std::map<std::string, int> index;
  for (std::size_t i = 0; i < cfg.objects.size(); ++i) {
    const auto& oc = cfg.objects[i];
    const std::string key = "objects[" + std::to_string(i) + "]";
    validate_medium(oc.medium, key + ".medium");
    if (oc.name.empty()) throw ValidationError("object name must be non-empty", key + ".name");
    if (!index.emplace(oc.name, int(i)).second)
      throw ValidationError("duplicate object name '" + oc.name + "'", key + ".name");
    scene.objects.push_back({oc.name, oc.medium, {}});
  }

  // One piece per primitive; member lists per object (unordered for now).
  std::vector<std::vector<int>> members(cfg.objects.size());
  auto add_piece = [&](const Primitive& prim, PieceKind kind, int owner, int neighbor,
                       const std::string& key) {
    BoundaryPiece p;
    p.id = int(scene.pieces.size());
    p.kind = kind;
    p.owner = owner;
    p.neighbor = neighbor;
    try {
      p.segments = discretize(prim, cfg.h_target_m);
    } catch (const ValidationError& e) {
      throw ValidationError(e.what(), key);
    }
    members[owner].push_back(p.id);
    if (neighbor >= 0) members[neighbor].push_back(p.id);
    scene.pieces.push_back(std::move(p));
  };
  for (std::size_t i = 0; i < cfg.objects.size(); ++i)
    for (std::size_t c = 0; c < cfg.objects[i].contour.size(); ++c)
      add_piece(cfg.objects[i].contour[c], PieceKind::Outer, int(i), -1,
                "objects[" + std::to_string(i) + "].contour[" + std::to_string(c) + "]");

  for (std::size_t s = 0; s < cfg.shared.size(); ++s) {
    const auto& sc = cfg.shared[s];
    const std::string key = "shared[" + std::to_string(s) + "]";
    const auto a = index.find(sc.object_a);
    const auto b = index.find(sc.object_b);
    if (a == index.end()) throw ValidationError("unknown object '" + sc.object_a + "'", key + ".object_a");
    if (b == index.end()) throw ValidationError("unknown object '" + sc.object_b + "'", key + ".object_b");
    if (a->second == b->second)
      throw ValidationError("a shared piece must join two different objects", key);
    add_piece(sc.primitive, PieceKind::Shared, a->second, b->second, key);
  }

  // Interface graph must be a tree (forest over connected components).
  {
    std::vector<int> parent(cfg.objects.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (const auto& p : scene.pieces) {
      if (!p.shared()) continue;
      const int ra = find(p.owner), rb = find(p.neighbor);
      if (ra == rb)
        throw ValidationError("interface graph has a cycle (objects '" + scene.objects[p.owner].name +
                                  "' and '" + scene.objects[p.neighbor].name + "')",
                              "shared");
      parent[ra] = rb;
    }
  }

  double scale = 0.0;
  for (const auto& p : scene.pieces)
    for (const auto& s : p.segments)
      scale = std::max({scale, std::abs(s.start.x), std::abs(s.start.y), std::abs(s.end.x), std::abs(s.end.y)});
  const double tol = 1e-9 * std::max(scale, 1.0);

  // Chain each object's pieces into a closed counterclockwise loop.
  std::vector<std::vector<detail::ChainLink>> chains(cfg.objects.size());
  for (std::size_t o = 0; o < cfg.objects.size(); ++o) {
    const std::string key = "objects[" + std::to_string(o) + "]";
    auto& ids = members[o];
    if (ids.empty()) throw ValidationError("object has no boundary", key);
    // Start from an outer piece when there is one.
    std::stable_partition(ids.begin(), ids.end(), [&](int id) { return !scene.pieces[id].shared(); });
    std::vector<bool> used(ids.size(), false);
    auto& chain = chains[o];
    chain.push_back({ids[0], true});
    used[0] = true;
    const Vec2 origin = scene.pieces[ids[0]].segments.front().start;
    Vec2 cursor = scene.pieces[ids[0]].segments.back().end;
    for (std::size_t step = 1; step < ids.size(); ++step) {
      bool found = false;
      for (std::size_t k = 0; k < ids.size() && !found; ++k) {
        if (used[k]) continue;
        const auto& segs = scene.pieces[ids[k]].segments;
        if (detail::same_point(segs.front().start, cursor, tol)) {
          chain.push_back({ids[k], true});
          cursor = segs.back().end;
          found = used[k] = true;
        } else if (detail::same_point(segs.back().end, cursor, tol)) {
          chain.push_back({ids[k], false});
          cursor = segs.front().start;
          found = used[k] = true;
        }
      }
      if (!found) throw ValidationError("contour is not closed (dangling piece end)", key);
    }
    if (!detail::same_point(cursor, origin, tol)) throw ValidationError("contour is not closed", key);

    SegmentList loop;
    for (const auto& link : chain) {
      const auto& segs = scene.pieces[link.piece].segments;
      if (link.forward) loop.insert(loop.end(), segs.begin(), segs.end());
      else {
        const auto r = detail::reversed(segs);
        loop.insert(loop.end(), r.begin(), r.end());
      }
    }
    for (std::size_t i = 0; i < loop.size(); ++i)
      for (std::size_t j = i + 2; j < loop.size(); ++j) {
        if (i == 0 && j == loop.size() - 1) continue;
        if (detail::segments_intersect(loop[i], loop[j], tol))
          throw ValidationError("contour self-intersects or overlaps itself (non-conforming pieces?)", key);
      }
    if (detail::signed_area(loop) < 0.0) {
      std::reverse(chain.begin(), chain.end());
      for (auto& link : chain) link.forward = !link.forward;
    }
  }

  // Store each piece counterclockwise for its owner, then record the sign
  // every object sees.
  for (auto& p : scene.pieces) {
    for (const auto& link : chains[p.owner]) {
      if (link.piece != p.id) continue;
      if (!link.forward) p.segments = detail::reversed(p.segments);
    }
  }
  for (std::size_t o = 0; o < cfg.objects.size(); ++o) {
    for (const auto& link : chains[o]) {
      const auto& p = scene.pieces[link.piece];
      double sign = 1.0;
      if (p.shared() && p.owner != int(o)) {
        sign = -1.0;
        // After re-orientation the owner walks it forward; the neighbor must
        // walk it backward, otherwise the objects lie on the same side.
        const bool owner_forward_originally = [&] {
          for (const auto& l : chains[p.owner])
            if (l.piece == p.id) return l.forward;
          return true;
        }();
        if (link.forward == owner_forward_originally)
          throw ValidationError("objects '" + scene.objects[p.owner].name + "' and '" + scene.objects[o].name +
                                    "' lie on the same side of their shared piece",
                                "shared");
      }
      scene.objects[o].pieces.push_back({link.piece, sign});
    }
  }
  return scene;
}

// Average count of segments per free-space wavelength.
inline double acspw(const Scene& scene) {
  double total = 0.0;
  std::size_t n = 0;
  for (const auto& p : scene.pieces)
    for (const auto& s : p.segments) {
      total += s.length;
      ++n;
    }
  return scene.wavelength() / (total / double(n));
}

// Same scene rebuilt at another frequency (discretization is frequency independent).
inline SceneConfig with_frequency(SceneConfig cfg, double frequency_hz) {
  cfg.frequency_hz = frequency_hz;
  return cfg;
}

}  // namespace ssie2d

#endif  // SSIE2D_GEOMETRY_HPP
