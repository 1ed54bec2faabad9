#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles/mie_oracle.hpp"
#include "scene_util.hpp"
#include "ssie2d/postproc.hpp"
#include "ssie2d/solver.hpp"

using namespace ssie2d;

namespace {

Matrix random_matrix(Eigen::Index r, Eigen::Index c, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> d;
  Matrix m(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) m(i, j) = cplx(d(gen), d(gen));
  return m;
}

struct Prepared {
  Scene scene;
  SurfaceOperator Ys;
  OperatorBlock Phat;
  Vector einc;
};

Prepared prepare(const std::string& name, const Excitation& exc = {}) {
  Prepared p{testutil::scene(name), {}, {}, {}};
  p.Ys = build_Ys(build_Y(p.scene), build_Yhat(p.scene));
  p.Phat = assemble_Phat(p.scene);
  const auto pts = midpoints(p.scene.gather(p.scene.outer_pieces()));
  p.einc = incident_field(pts, p.scene.background, p.scene.omega(), exc);
  return p;
}

}  // namespace

TEST(LuSolve, Examples) {
  const Matrix b = random_matrix(4, 2, 1);
  EXPECT_TRUE(lu_solve(Matrix::Identity(4, 4), b) == b);
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = 2.0;
  a(1, 1) = 4.0;
  Vector rhs(2);
  rhs << 2.0, 4.0;
  const Vector x = lu_solve(a, rhs);
  EXPECT_EQ(x(0), cplx(1.0));
  EXPECT_EQ(x(1), cplx(1.0));
}

TEST(LuSolve, RoundTripAndResidual) {
  const Matrix a = random_matrix(50, 50, 2);
  const Matrix x_true = random_matrix(50, 3, 3);
  const Matrix x = lu_solve(a, Matrix(a * x_true));
  EXPECT_LT((x - x_true).norm(), 1e-8 * x_true.norm());
  const double anorm = Eigen::BDCSVD<Matrix>(a).singularValues()(0);
  EXPECT_LE((a * x - a * x_true).norm(), 1e-10 * anorm * x.norm());
}

TEST(LuSolve, SingularPivotIsReported) {
  Matrix a = Matrix::Identity(3, 3);
  a.col(1).setZero();
  try {
    lu_solve(a, Vector(Vector::Ones(3)), "probe");
    FAIL() << "expected SingularMatrixError";
  } catch (const SingularMatrixError& e) {
    EXPECT_EQ(e.pivot(), 1);
    EXPECT_TRUE(std::isinf(e.cond_estimate()));
    EXPECT_NE(std::string(e.what()).find("probe"), std::string::npos);
  }
  EXPECT_THROW(lu_solve(random_matrix(3, 2, 4), Vector(Vector::Ones(3))), DomainError);
  EXPECT_THROW(lu_solve(Matrix::Identity(3, 3), Vector(Vector::Ones(2))), DomainError);
}

TEST(Cond2, Examples) {
  EXPECT_DOUBLE_EQ(cond2(Matrix::Identity(5, 5)), 1.0);
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 10.0;
  d(1, 1) = 1.0;
  EXPECT_NEAR(cond2(d), 10.0, 1e-12);
  d(1, 1) = 0.0;
  EXPECT_TRUE(std::isinf(cond2(d)));
  EXPECT_THROW(cond2(Matrix()), DomainError);
}

TEST(Cond2, InvariantUnderConjugateTranspose) {
  for (unsigned seed : {5u, 6u, 7u}) {
    const Matrix a = random_matrix(30, 30, seed);
    const double c = cond2(a);
    EXPECT_GE(c, 1.0);
    EXPECT_NEAR(cond2(a.adjoint()), c, 1e-10 * c);
  }
}

TEST(SolveExterior, ZeroContrastGivesIncidentField) {
  const auto p = prepare("zero_contrast_cylinder.json");
  EXPECT_EQ(p.Ys.matrix.norm(), 0.0);
  const auto out = solve_exterior(p.Ys, p.Phat, p.einc);
  EXPECT_TRUE(out.E_outer == p.einc);
  EXPECT_EQ(out.J_outer.norm(), 0.0);
  EXPECT_DOUBLE_EQ(out.cond_final, 1.0);
}

TEST(SolveExterior, ResidualLinearityAndConditioning) {
  auto p = prepare("semicontact_cylinder.json");
  const auto a = solve_exterior(p.Ys, p.Phat, p.einc);
  EXPECT_EQ(a.E_outer.size(), 126);
  EXPECT_EQ(a.J_outer.size(), 126);
  EXPECT_GE(a.cond_final, 1.0);
  EXPECT_LT(a.cond_final, 1e3);
  EXPECT_LE(a.residual, 1e-9 * a.cond_final);

  const Vector twice = 2.0 * p.einc;
  const auto b = solve_exterior(p.Ys, p.Phat, twice);
  EXPECT_LT((b.E_outer - 2.0 * a.E_outer).norm(), 1e-13 * a.E_outer.norm());
  EXPECT_LT((b.J_outer - 2.0 * a.J_outer).norm(), 1e-13 * a.J_outer.norm());

  EXPECT_THROW(solve_exterior(p.Ys, p.Phat, Vector(p.einc.head(10))), DomainError);
}

TEST(SolveScene, HomogeneousCylinderAgainstSeries) {
  const Scene sc = testutil::scene("homogeneous_cylinder.json");
  ASSERT_GE(acspw(sc), 20.0);
  const Excitation exc{};
  const auto s = solve_scene(sc, exc);
  const auto phi = testutil::degrees(0.0, 360.0, 361);
  const auto calc = bistatic_rcs(s.out.J_outer, s.outer_segments, sc.background, sc.omega(), phi, 1.0);
  RcsCurve ref = calc;
  ref.sigma = oracle::mie_echo_width(1.0, 4.0, sc.background.wavenumber(sc.omega()).real(), phi);
  EXPECT_LT(relative_error_rcs(calc, ref), 1e-2);
  EXPECT_EQ(s.out.frequency, 300e6);
}

TEST(SolveScene, CondLogEndsWithFinalMatrix) {
  const Scene sc = testutil::scene("semicontact_cylinder.json");
  const auto s = solve_scene(sc, Excitation{}, true);
  ASSERT_FALSE(s.cond.empty());
  EXPECT_EQ(s.cond.back().name, "I - Phat Ys");
  EXPECT_DOUBLE_EQ(s.cond.back().cond, s.out.cond_final);
  EXPECT_TRUE(solve_scene(sc, Excitation{}).cond.empty());
}

TEST(SceneDigest, StableAndSensitive) {
  const SceneConfig cfg = testutil::config("semicontact_cylinder.json");
  const std::string a = scene_digest(build_scene(cfg));
  EXPECT_EQ(a.size(), 16u);
  EXPECT_EQ(a, scene_digest(build_scene(cfg)));
  EXPECT_NE(a, scene_digest(build_scene(with_frequency(cfg, 301e6))));
  SceneConfig c2 = cfg;
  c2.objects[1].medium.eps_rel = 4.5;
  EXPECT_NE(a, scene_digest(build_scene(c2)));
}
