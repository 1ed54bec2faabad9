#ifndef SSIE2D_TESTS_SCENE_UTIL_HPP
#define SSIE2D_TESTS_SCENE_UTIL_HPP

#include <string>

#include "ssie2d/config.hpp"
#include "ssie2d/geometry.hpp"

namespace testutil {

inline std::string scene_path(const std::string& name) { return std::string(SSIE2D_SCENE_DIR) + "/" + name; }

inline ssie2d::SceneConfig config(const std::string& name) { return ssie2d::load_scene_config(scene_path(name)); }

inline ssie2d::Scene scene(const std::string& name) { return ssie2d::build_scene(config(name)); }

inline std::vector<double> degrees(double start, double end, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back((start + (end - start) * i / (n - 1)) * ssie2d::kPi / 180.0);
  return out;
}

}  // namespace testutil

#endif
