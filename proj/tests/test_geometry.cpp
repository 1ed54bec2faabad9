#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "scene_util.hpp"
#include "ssie2d/config.hpp"
#include "ssie2d/geometry.hpp"

using namespace ssie2d;

namespace {

SceneConfig two_squares() {
  SceneConfig cfg;
  cfg.frequency_hz = 3e8;
  cfg.h_target_m = 0.1;
  cfg.objects.push_back({"left", {2.0, 0.0, 1.0}, {Primitive::polyline({{0, -1}, {-1, -1}, {-1, 0}, {0, 0}})}});
  cfg.objects.push_back({"right", {3.0, 0.0, 1.0}, {Primitive::polyline({{0, -1}, {1, -1}, {1, 0}, {0, 0}})}});
  return cfg;
}

}  // namespace

TEST(Medium, WavenumberBranch) {
  const double w = 2 * kPi * 3e8;
  const Medium vac;
  EXPECT_NEAR(vac.wavenumber(w).real(), w / kSpeedOfLight, 1e-9);
  EXPECT_EQ(vac.wavenumber(w).imag(), 0.0);
  const Medium lossy{2.0, 0.05, 1.0};
  const cplx k = lossy.wavenumber(w);
  EXPECT_GT(k.real(), 0.0);
  EXPECT_LT(k.imag(), 0.0);
  EXPECT_NEAR(std::abs(k * k - w * w * kMu0 * kEps0 * lossy.eps_complex(w)) / std::norm(k), 0.0, 1e-14);
}

TEST(Discretize, PolylineExamples) {
  const std::vector<Vec2> unit{{0, 0}, {1, 0}};
  const auto a = discretize_polyline(unit, 0.05);
  ASSERT_EQ(a.size(), 20u);
  for (const auto& s : a) EXPECT_NEAR(s.length, 0.05, 1e-15);

  const std::vector<Vec2> longer{{0, 0}, {1.02, 0}};
  const auto b = discretize_polyline(longer, 0.05);
  ASSERT_EQ(b.size(), 21u);
  EXPECT_NEAR(b[0].length, 1.02 / 21, 1e-15);

  const std::vector<Vec2> bent{{0, 0}, {0.3, 0}, {0.3, 0.25}};
  const auto c = discretize_polyline(bent, 0.1);
  ASSERT_EQ(c.size(), 6u);
  EXPECT_EQ(c[2].end, (Vec2{0.3, 0.0}));
  EXPECT_EQ(c.back().end, (Vec2{0.3, 0.25}));
  for (const auto& s : c) EXPECT_LE(s.length, 0.1 * (1 + 1e-12));
}

TEST(Discretize, PolylineErrors) {
  const std::vector<Vec2> one{{0, 0}};
  const std::vector<Vec2> dup{{0, 0}, {0, 0}};
  EXPECT_THROW(discretize_polyline(one, 0.1), ValidationError);
  EXPECT_THROW(discretize_polyline(dup, 0.1), ValidationError);
}

TEST(Discretize, ArcExamples) {
  EXPECT_EQ(discretize_arc({0, 0}, 1.0, 0.0, kPi, 0.05).size(), 63u);
  const auto full = discretize_arc({0, 0}, 1.0, 0.0, 2 * kPi, 0.05);
  EXPECT_EQ(full.size(), 126u);
  const double perim = std::accumulate(full.begin(), full.end(), 0.0, [](double s, const Segment& g) { return s + g.length; });
  EXPECT_LT(perim, 2 * kPi);
  EXPECT_EQ(discretize_arc({0, 0}, 2.0, 0.0, kPi / 2, 0.1).size(), 32u);
  for (const auto& s : full) {
    EXPECT_NEAR(norm(s.normal), 1.0, 1e-14);
    EXPECT_NEAR(dot(s.normal, s.end - s.start), 0.0, 1e-14);
    EXPECT_GT(dot(s.normal, s.midpoint), 0.0);
  }
}

TEST(Discretize, HalvingDoublesExactCounts) {
  const std::vector<Vec2> sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0}};
  EXPECT_EQ(discretize_polyline(sq, 0.025).size(), 2 * discretize_polyline(sq, 0.05).size());
}

TEST(BuildScene, SemicontactCylinderPieces) {
  const Scene s = testutil::scene("semicontact_cylinder.json");
  ASSERT_EQ(s.objects.size(), 2u);
  ASSERT_EQ(s.pieces.size(), 3u);
  const auto outer = s.outer_pieces();
  const auto shared = s.shared_pieces();
  ASSERT_EQ(outer.size(), 2u);
  ASSERT_EQ(shared.size(), 1u);
  EXPECT_EQ(s.pieces[outer[0]].size(), 63u);
  EXPECT_EQ(s.pieces[outer[1]].size(), 63u);
  EXPECT_EQ(s.pieces[shared[0]].size(), 40u);
  EXPECT_EQ(s.segment_count(outer), 126u);
  EXPECT_EQ(interface_edges(s).size(), 1u);
}

TEST(BuildScene, SingleObjectHasNoEdges) {
  const Scene s = testutil::scene("homogeneous_cylinder.json");
  EXPECT_EQ(s.objects.size(), 1u);
  EXPECT_TRUE(interface_edges(s).empty());
  EXPECT_EQ(s.total_segments(), 126u);
}

TEST(BuildScene, CuboidCounts) {
  const Scene s = testutil::scene("composite_cuboid.json");
  EXPECT_EQ(s.segment_count(s.outer_pieces()), 240u);
  EXPECT_EQ(s.total_segments(), 260u);
  EXPECT_EQ(interface_edges(s).size(), 2u);
}

class SceneInvariants : public ::testing::TestWithParam<const char*> {};

TEST_P(SceneInvariants, ClosureOrientationAndSharedNormals) {
  const Scene s = testutil::scene(GetParam());
  for (std::size_t o = 0; o < s.objects.size(); ++o) {
    Vec2 sum{};
    double perim = 0.0, area2 = 0.0;
    for (const auto& ref : s.objects[o].pieces) {
      const auto& p = s.pieces[ref.piece];
      for (const auto& g : p.segments) {
        const Segment t = ref.normal_sign > 0 ? g : g.reversed();
        sum = sum + (t.end - t.start);
        perim += t.length;
        area2 += cross(t.start, t.end);
      }
    }
    EXPECT_LT(norm(sum), 1e-12 * perim) << "object " << o;
    EXPECT_GT(area2, 0.0) << "object " << o;
  }
  for (int id : s.shared_pieces()) {
    const auto& p = s.pieces[id];
    EXPECT_EQ(s.normal_sign(p.owner, id), 1.0);
    EXPECT_EQ(s.normal_sign(p.neighbor, id), -1.0);
  }
  for (int id : s.outer_pieces()) EXPECT_EQ(s.normal_sign(s.pieces[id].owner, id), 1.0);
}

INSTANTIATE_TEST_SUITE_P(Scenes, SceneInvariants,
                         ::testing::Values("semicontact_cylinder.json", "composite_cuboid.json",
                                           "homogeneous_cylinder.json", "zero_contrast_cylinder.json"));

TEST(BuildScene, TwoSquaresSharingAnEdge) {
  auto cfg = two_squares();
  cfg.shared.push_back({"left", "right", Primitive::polyline({{0, 0}, {0, -1}})});
  const Scene s = build_scene(cfg);
  EXPECT_EQ(s.shared_pieces().size(), 1u);
  EXPECT_EQ(s.pieces[s.shared_pieces()[0]].size(), 10u);
}

TEST(BuildScene, CyclicInterfaceGraphRejected) {
  // Two objects touching along two separate pieces.
  SceneConfig cfg;
  cfg.frequency_hz = 3e8;
  cfg.h_target_m = 0.1;
  cfg.objects.push_back({"a", {2.0, 0.0, 1.0}, {Primitive::polyline({{1, 0}, {0, 1}, {-1, 0}})}});
  cfg.objects.push_back({"b", {3.0, 0.0, 1.0}, {Primitive::polyline({{-1, 0}, {0, -1}, {1, 0}})}});
  cfg.shared.push_back({"a", "b", Primitive::polyline({{-1, 0}, {0, 0}})});
  cfg.shared.push_back({"a", "b", Primitive::polyline({{0, 0}, {1, 0}})});
  EXPECT_THROW(build_scene(cfg), ValidationError);
}

TEST(BuildScene, OpenContourRejected) {
  SceneConfig cfg;
  cfg.frequency_hz = 3e8;
  cfg.h_target_m = 0.1;
  cfg.objects.push_back({"a", {2.0, 0.0, 1.0}, {Primitive::polyline({{0, 0}, {1, 0}, {1, 1}})}});
  EXPECT_THROW(build_scene(cfg), ValidationError);
}

TEST(BuildScene, InvalidMediumNamesKey) {
  auto j = read_json_file(testutil::scene_path("semicontact_cylinder.json"));
  j["objects"][0]["medium"]["eps_rel"] = -1.0;
  j["objects"][0]["medium"]["sigma"] = -0.1;
  try {
    parse_scene_config(j);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.key(), "objects[0].medium");
  }
}

TEST(BuildScene, UnknownKeyRejected) {
  auto j = read_json_file(testutil::scene_path("homogeneous_cylinder.json"));
  j["objects"][0]["colour"] = "red";
  EXPECT_THROW(parse_scene_config(j), ValidationError);
}

TEST(Acspw, Examples) {
  Scene s = testutil::scene("semicontact_cylinder.json");
  // Every segment is close to, but not exactly, 0.05 m; rebuild a uniform case.
  SceneConfig cfg;
  cfg.frequency_hz = 3e8;
  cfg.h_target_m = 0.05;
  cfg.objects.push_back({"sq", {2.0, 0.0, 1.0}, {Primitive::polyline({{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0}})}});
  const Scene sq = build_scene(cfg);
  EXPECT_NEAR(acspw(sq), kSpeedOfLight / 3e8 / 0.05, 1e-9);
  EXPECT_NEAR(acspw(sq), 19.9862, 1e-4);

  cfg.frequency_hz = kSpeedOfLight;  // lambda0 = 1 m
  cfg.h_target_m = 0.1;
  EXPECT_NEAR(acspw(build_scene(cfg)), 10.0, 1e-9);
  EXPECT_GT(acspw(s), 19.0);
}

TEST(Acspw, MixedLengthsUseTheMean) {
  SceneConfig cfg;
  cfg.frequency_hz = kSpeedOfLight;
  cfg.h_target_m = 0.1;
  cfg.objects.push_back({"r", {2.0, 0.0, 1.0}, {Primitive::polyline({{0, 0}, {0.1, 0}, {0.1, 0.05}, {0, 0.05}, {0, 0}})}});
  EXPECT_NEAR(acspw(build_scene(cfg)), 1.0 / 0.075, 1e-9);
}
