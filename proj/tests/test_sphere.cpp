#include "oracles.hpp"
#include "sphap/sphere.hpp"

#include <doctest.h>

using namespace sphap;

TEST_CASE("from_rows validates unit norms") {
  MatrixX3 g(2, 3);
  g << 1, 0, 0, 0, 0.6, 0.8;
  CHECK_NOTHROW(SphericalMapping::from_rows(g));
  g(1, 2) = 0.81;
  CHECK_THROWS_AS(SphericalMapping::from_rows(g), ContractError);
}

TEST_CASE("tangent projection is orthogonal and idempotent") {
  const auto f = SphericalMapping::from_rows(oracle::random_sphere_points(50, 1));
  const MatrixX3 g = oracle::random_sphere_points(50, 2) * 3.0;
  const auto xi = project_tangent(f, g);
  const Eigen::VectorXd dots = (xi.vectors.array() * f.rows().array()).rowwise().sum();
  CHECK(dots.cwiseAbs().maxCoeff() < 1e-14);
  const auto xi2 = project_tangent(f, xi.vectors);
  CHECK((xi2.vectors - xi.vectors).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("retraction lands on the sphere and is first-order exact") {
  const auto f = SphericalMapping::from_rows(oracle::random_sphere_points(30, 3));
  const auto xi = project_tangent(f, oracle::random_sphere_points(30, 4));
  for (double a : {1.0, 1e-2, 1e-4}) {
    const auto g = retract(f, xi, a);
    CHECK((g.rows().rowwise().norm().array() - 1.0).abs().maxCoeff() < 1e-15);
    // R(a xi) = f + a xi + O(a^2)
    const double err = (g.rows() - f.rows() - a * xi.vectors).cwiseAbs().maxCoeff();
    CHECK(err <= a * a);
  }
  CHECK((retract(f, xi, 0.0).rows() - f.rows()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("retraction through the origin is an error") {
  MatrixX3 p(1, 3);
  p << 0, 0, 1;
  const auto f = SphericalMapping::from_rows(p);
  TangentField xi{MatrixX3(1, 3)};
  xi.vectors << 0, 0, -1;  // not tangent on purpose
  CHECK_THROWS_AS(retract(f, xi, 1.0), NumericalError);
}

TEST_CASE("stereographic projection round trip") {
  const auto f = SphericalMapping::from_rows(oracle::random_sphere_points(200, 5));
  const auto h = stereographic(f);
  const auto back = inverse_stereographic(h);
  CHECK((back.rows() - f.rows()).cwiseAbs().maxCoeff() < 1e-12);
  // equator maps to the unit circle, south pole to 0
  MatrixX3 q(3, 3);
  q << 1, 0, 0, 0, 0, -1, 0, 0, 1;
  const auto hq = stereographic(SphericalMapping::from_rows(q));
  CHECK(std::abs(hq.values[0] - std::complex<double>(1, 0)) < 1e-15);
  CHECK(std::abs(hq.values[1]) == 0.0);
  REQUIRE(hq.infinity);
  CHECK(*hq.infinity == 2);
  CHECK(inverse_stereographic(hq).row(2) == Vector3(0, 0, 1));
}

TEST_CASE("two vertices at the north pole cannot both be projected") {
  MatrixX3 q(2, 3);
  q << 0, 0, 1, 0, 0, 1;
  CHECK_THROWS_AS(stereographic(SphericalMapping::from_rows(q)), NumericalError);
}

TEST_CASE("inversion exchanges inside and outside and acts as a reflection") {
  const auto f = SphericalMapping::from_rows(oracle::random_sphere_points(100, 6));
  const auto h = stereographic(f);
  const auto g = invert_plane(h);
  for (Index i = 0; i < h.size(); ++i)
    CHECK(std::abs(std::abs(g.values[i]) * std::abs(h.values[i]) - 1.0) < 1e-12);
  // 1/conj(z) pulled back is (x, y, z) -> (x, y, -z)
  const auto lifted = inverse_stereographic(g);
  MatrixX3 mirrored = f.rows();
  mirrored.col(2) *= -1.0;
  CHECK((lifted.rows() - mirrored).cwiseAbs().maxCoeff() < 1e-12);
  const auto gg = invert_plane(g);
  for (Index i = 0; i < h.size(); ++i) CHECK(std::abs(gg.values[i] - h.values[i]) < 1e-12);
}

TEST_CASE("inversion swaps zero and infinity") {
  PlanarMapping h;
  h.values = {{0, 0}, {2, 0}, {0, 0}};
  h.infinity = 2;
  const auto g = invert_plane(h);
  REQUIRE(g.infinity);
  CHECK(*g.infinity == 0);
  CHECK(g.values[2] == std::complex<double>(0, 0));
  CHECK(g.values[1] == std::complex<double>(0.5, 0));
}

TEST_CASE("fold counting on the identity and the mirrored sphere") {
  const auto s = make_icosphere(3);
  CHECK(count_folds(s, SphericalMapping::from_rows(s.vertices())) == 0);
  MatrixX3 m = s.vertices();
  m.col(0) *= -1.0;
  CHECK(count_folds(s, SphericalMapping::from_rows(m)) == s.num_faces());
  // serial and parallel agree
  const auto r1 = fold_report(s, m, Execution::serial);
  const auto r2 = fold_report(s, m, Execution::parallel);
  CHECK(r1.folds == r2.folds);
  CHECK(r1.degenerate == r2.degenerate);
}

TEST_CASE("collapsed faces are degenerate, not folded") {
  const auto s = make_icosphere(1);
  MatrixX3 f = s.vertices();
  const int v = s.faces()(0, 0);
  f.row(s.faces()(0, 1)) = f.row(v);
  const auto r = fold_report(s, f, Execution::serial);
  CHECK(r.degenerate >= 1);
}
