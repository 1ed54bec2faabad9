#ifndef SSIE2D_CONFIG_HPP
#define SSIE2D_CONFIG_HPP

// SceneConfig <-> JSON.
//
//   {
//     "frequency_hz": 3e8,
//     "h_target_m": 0.05,
//     "background": {"eps_rel": 1, "sigma": 0, "mu_rel": 1},
//     "objects": [
//       {"name": "upper", "medium": {"eps_rel": 2, "sigma": 0.05},
//        "contour": [{"type": "arc", "center": [0, 0], "radius": 1,
//                     "angle_start_deg": 0, "angle_end_deg": 180}]}
//     ],
//     "shared": [
//       {"object_a": "upper", "object_b": "lower",
//        "primitive": {"type": "polyline", "points": [[-1, 0], [1, 0]]}}
//     ],
//     "excitation": {"direction_deg": 0, "amplitude": [1, 0]}   (optional)
//   }
//
// `contour` lists the parts of an object's boundary that face the background;
// the shared primitives that reference the object close its contour. Keys
// named "notes" or starting with "_" are ignored anywhere.

#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "ssie2d/errors.hpp"
#include "ssie2d/geometry.hpp"

namespace ssie2d {

using json = nlohmann::json;

// Incident plane wave E = amplitude exp(-j k0 direction . r).
struct Excitation {
  Vec2 direction{1.0, 0.0};
  cplx amplitude{1.0, 0.0};

  static Excitation plane_wave_deg(double direction_deg, cplx amplitude = {1.0, 0.0}) {
    const double a = direction_deg * kPi / 180.0;
    return {{std::cos(a), std::sin(a)}, amplitude};
  }
  double direction_angle() const { return std::atan2(direction.y, direction.x); }
};

namespace detail {

inline void reject_unknown_keys(const json& j, const std::set<std::string>& allowed, const std::string& key) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    if (k == "notes" || (!k.empty() && k[0] == '_')) continue;
    if (!allowed.count(k)) throw ValidationError("unknown key '" + k + "'", key);
  }
}

inline const json& require(const json& j, const char* name, const std::string& key) {
  if (!j.is_object()) throw ValidationError("expected an object", key);
  const auto it = j.find(name);
  if (it == j.end()) throw ValidationError(std::string("missing key '") + name + "'", key);
  return *it;
}

inline double number(const json& j, const std::string& key) {
  if (!j.is_number()) throw ValidationError("expected a number", key);
  return j.get<double>();
}

inline Vec2 point(const json& j, const std::string& key) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ValidationError("expected [x, y]", key);
  return {j[0].get<double>(), j[1].get<double>()};
}

inline Medium parse_medium(const json& j, const std::string& key) {
  if (!j.is_object()) throw ValidationError("expected an object", key);
  reject_unknown_keys(j, {"eps_rel", "sigma", "mu_rel"}, key);
  Medium m;
  m.eps_rel = number(require(j, "eps_rel", key), key + ".eps_rel");
  if (j.contains("sigma")) m.sigma = number(j["sigma"], key + ".sigma");
  if (j.contains("mu_rel")) m.mu_rel = number(j["mu_rel"], key + ".mu_rel");
  validate_medium(m, key);
  return m;
}

inline Primitive parse_primitive(const json& j, const std::string& key) {
  const json& type = require(j, "type", key);
  if (!type.is_string()) throw ValidationError("expected a string", key + ".type");
  const auto t = type.get<std::string>();
  if (t == "polyline") {
    reject_unknown_keys(j, {"type", "points"}, key);
    const json& pts = require(j, "points", key);
    if (!pts.is_array() || pts.size() < 2) throw ValidationError("need at least 2 points", key + ".points");
    std::vector<Vec2> v;
    for (std::size_t i = 0; i < pts.size(); ++i) v.push_back(point(pts[i], key + ".points[" + std::to_string(i) + "]"));
    return Primitive::polyline(std::move(v));
  }
  if (t == "arc") {
    reject_unknown_keys(j, {"type", "center", "radius", "angle_start_deg", "angle_end_deg"}, key);
    const Vec2 c = point(require(j, "center", key), key + ".center");
    const double r = number(require(j, "radius", key), key + ".radius");
    const double a0 = number(require(j, "angle_start_deg", key), key + ".angle_start_deg");
    const double a1 = number(require(j, "angle_end_deg", key), key + ".angle_end_deg");
    if (!(r > 0.0)) throw ValidationError("must be > 0", key + ".radius");
    if (!(a1 > a0)) throw ValidationError("angle_end_deg must exceed angle_start_deg", key);
    return Primitive::arc(c, r, a0, a1);
  }
  throw ValidationError("unknown primitive type '" + t + "'", key + ".type");
}

}  // namespace detail

inline SceneConfig parse_scene_config(const json& j) {
  if (!j.is_object()) throw ValidationError("scene config must be a JSON object");
  detail::reject_unknown_keys(j, {"frequency_hz", "h_target_m", "background", "objects", "shared", "excitation"}, "");
  SceneConfig cfg;
  cfg.frequency_hz = detail::number(detail::require(j, "frequency_hz", ""), "frequency_hz");
  if (!(cfg.frequency_hz > 0.0)) throw ValidationError("must be > 0", "frequency_hz");
  cfg.h_target_m = detail::number(detail::require(j, "h_target_m", ""), "h_target_m");
  if (!(cfg.h_target_m > 0.0)) throw ValidationError("must be > 0", "h_target_m");
  cfg.background = detail::parse_medium(detail::require(j, "background", ""), "background");

  const json& objs = detail::require(j, "objects", "");
  if (!objs.is_array() || objs.empty()) throw ValidationError("expected a non-empty array", "objects");
  for (std::size_t i = 0; i < objs.size(); ++i) {
    const std::string key = "objects[" + std::to_string(i) + "]";
    const json& o = objs[i];
    if (!o.is_object()) throw ValidationError("expected an object", key);
    detail::reject_unknown_keys(o, {"name", "medium", "contour"}, key);
    ObjectConfig oc;
    const json& name = detail::require(o, "name", key);
    if (!name.is_string()) throw ValidationError("expected a string", key + ".name");
    oc.name = name.get<std::string>();
    oc.medium = detail::parse_medium(detail::require(o, "medium", key), key + ".medium");
    if (o.contains("contour")) {
      const json& c = o["contour"];
      if (!c.is_array()) throw ValidationError("expected an array", key + ".contour");
      for (std::size_t k = 0; k < c.size(); ++k)
        oc.contour.push_back(detail::parse_primitive(c[k], key + ".contour[" + std::to_string(k) + "]"));
    }
    cfg.objects.push_back(std::move(oc));
  }

  if (j.contains("shared")) {
    const json& sh = j["shared"];
    if (!sh.is_array()) throw ValidationError("expected an array", "shared");
    for (std::size_t i = 0; i < sh.size(); ++i) {
      const std::string key = "shared[" + std::to_string(i) + "]";
      const json& s = sh[i];
      if (!s.is_object()) throw ValidationError("expected an object", key);
      detail::reject_unknown_keys(s, {"object_a", "object_b", "primitive"}, key);
      SharedConfig sc;
      const json& a = detail::require(s, "object_a", key);
      const json& b = detail::require(s, "object_b", key);
      if (!a.is_string()) throw ValidationError("expected a string", key + ".object_a");
      if (!b.is_string()) throw ValidationError("expected a string", key + ".object_b");
      sc.object_a = a.get<std::string>();
      sc.object_b = b.get<std::string>();
      sc.primitive = detail::parse_primitive(detail::require(s, "primitive", key), key + ".primitive");
      cfg.shared.push_back(std::move(sc));
    }
  }
  return cfg;
}

inline Excitation parse_excitation(const json& j) {
  Excitation exc;
  if (!j.contains("excitation")) return exc;
  const json& e = j["excitation"];
  detail::reject_unknown_keys(e, {"direction_deg", "amplitude"}, "excitation");
  double deg = 0.0;
  if (e.contains("direction_deg")) deg = detail::number(e["direction_deg"], "excitation.direction_deg");
  cplx amp{1.0, 0.0};
  if (e.contains("amplitude")) {
    const Vec2 a = detail::point(e["amplitude"], "excitation.amplitude");
    amp = {a.x, a.y};
  }
  return Excitation::plane_wave_deg(deg, amp);
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path + "'");
  try {
    return json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("JSON parse error: ") + e.what());
  }
}

inline SceneConfig load_scene_config(const std::string& path) { return parse_scene_config(read_json_file(path)); }

}  // namespace ssie2d

#endif  // SSIE2D_CONFIG_HPP
