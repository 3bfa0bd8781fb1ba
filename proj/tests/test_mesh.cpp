#include "sphap/mesh.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace sphap;

namespace {

const char* kTetraObj = R"(# tetrahedron
v 0 0 0
v 1 0 0
v 0 1 0
v 0 0 1
f 1 3 2
f 1 2 4
f 1 4 3
f 2 3 4
)";

std::filesystem::path temp_file(const std::string& name, const std::string& text) {
  const auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST_CASE("obj tetrahedron parses with areas and euler characteristic") {
  const auto s = parse_mesh(kTetraObj, MeshFormat::obj);
  CHECK(s.num_vertices() == 4);
  CHECK(s.num_faces() == 4);
  CHECK(s.num_edges() == 6);
  CHECK(s.euler_characteristic() == 2);
  CHECK(s.face_areas()[0] == doctest::Approx(0.5));
  CHECK(s.face_areas()[3] == doctest::Approx(std::sqrt(3.0) / 2.0));
  CHECK(s.total_area() == doctest::Approx(1.5 + std::sqrt(3.0) / 2.0));
}

TEST_CASE("obj slash tokens and negative indices") {
  const auto s = parse_mesh(R"(v 0 0 0
v 1 0 0
v 0 1 0
v 0 0 1
vn 0 0 1
f 1//1 3//1 2//1
f 1/1/1 2/1/1 4/1/1
f -4 -1 -2
f 2 3 4
)",
                            MeshFormat::obj);
  CHECK(s.faces()(2, 0) == 0);
  CHECK(s.faces()(2, 1) == 3);
  CHECK(s.faces()(2, 2) == 2);
}

TEST_CASE("off format keeps zero-based indices") {
  const auto s = parse_mesh(R"(OFF
# comment
4 4 6
0 0 0
1 0 0
0 1 0
0 0 1
3 0 2 1
3 0 1 3
3 0 3 2
3 1 2 3
)",
                            MeshFormat::off);
  CHECK(s.num_faces() == 4);
  CHECK(s.faces()(3, 2) == 3);
}

TEST_CASE("parse errors carry line numbers") {
  CHECK_THROWS_WITH_AS(parse_mesh("v 0 0 0\nv 1 0 zz\n", MeshFormat::obj),
                       doctest::Contains("line 2"), ParseError);
  CHECK_THROWS_WITH_AS(parse_mesh("v 0 0 0\nv 1 0 0\nv 0 1 0\nv 1 1 0\nf 1 2 3 4\n",
                                  MeshFormat::obj),
                       doctest::Contains("non-triangle face at line 5"), ParseError);
}

TEST_CASE("open and non-manifold surfaces are rejected") {
  CHECK_THROWS_WITH_AS(parse_mesh("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n", MeshFormat::obj),
                       doctest::Contains("open surface: boundary edge"), TopologyError);
  MatrixX3 V(5, 3);
  V << 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1, 1, 1, 1;
  FaceMatrix F(3, 3);
  F << 0, 1, 2, 0, 1, 3, 0, 1, 4;
  CHECK_THROWS_WITH_AS(SimplicialSurface(V, F), doctest::Contains("non-manifold edge (0, 1)"),
                       TopologyError);
}

TEST_CASE("torus fails the genus check unless downgraded to a warning") {
  // 3x3 grid torus
  const int N = 3;
  MatrixX3 V(N * N, 3);
  FaceMatrix F(2 * N * N, 3);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      const double u = 2 * M_PI * i / N, v = 2 * M_PI * j / N;
      V.row(i * N + j) << (2 + std::cos(v)) * std::cos(u), (2 + std::cos(v)) * std::sin(u),
          std::sin(v);
      const int a = i * N + j, b = ((i + 1) % N) * N + j, c = ((i + 1) % N) * N + (j + 1) % N,
                d = i * N + (j + 1) % N;
      F.row(2 * a) << a, b, c;
      F.row(2 * a + 1) << a, c, d;
    }
  CHECK_THROWS_WITH_AS(SimplicialSurface(V, F), doctest::Contains("Euler characteristic"),
                       TopologyError);
  const SimplicialSurface warned(V, F, TopologyCheck::warn_genus);
  REQUIRE(warned.warnings().size() == 1);
  CHECK(warned.euler_characteristic() == 0);
}

TEST_CASE("out-of-range and repeated indices") {
  MatrixX3 V(3, 3);
  V.setIdentity();
  FaceMatrix F(1, 3);
  F << 0, 1, 7;
  CHECK_THROWS_AS(SimplicialSurface(V, F, TopologyCheck::none), TopologyError);
  F << 0, 1, 1;
  CHECK_THROWS_AS(SimplicialSurface(V, F, TopologyCheck::none), TopologyError);
}

TEST_CASE("icosphere counts and unit radius") {
  for (int k = 0; k <= 3; ++k) {
    const auto s = make_icosphere(k);
    const Index faces = 20 * (Index(1) << (2 * k));
    CHECK(s.num_faces() == faces);
    CHECK(s.num_vertices() == faces / 2 + 2);
    CHECK(s.euler_characteristic() == 2);
    CHECK((s.vertices().rowwise().norm().array() - 1.0).abs().maxCoeff() < 1e-15);
  }
  // area converges to 4 pi from below
  CHECK(make_icosphere(4).total_area() == doctest::Approx(4 * M_PI).epsilon(0.01));
  CHECK(make_icosphere(4).total_area() < 4 * M_PI);
}

TEST_CASE("faces are consistently outward oriented") {
  const auto s = make_icosphere(2, Vector3(1.0, 0.8, 0.6));
  for (Index t = 0; t < s.num_faces(); ++t) {
    const Vector3 a = s.vertices().row(s.faces()(t, 0));
    const Vector3 b = s.vertices().row(s.faces()(t, 1));
    const Vector3 c = s.vertices().row(s.faces()(t, 2));
    CHECK(a.dot(b.cross(c)) > 0.0);
  }
}

TEST_CASE("save and reload round trip is exact") {
  const auto s = make_bumpy_sphere(2, 0.2, 3.0);
  for (auto ext : {".obj", ".off"}) {
    const auto p = std::filesystem::temp_directory_path() / (std::string("sphap_rt") + ext);
    save_mesh(p, s);
    const auto r = load_mesh(p);
    CHECK(r.vertices() == s.vertices());
    CHECK(r.faces() == s.faces());
  }
}

TEST_CASE("noise is reproducible and along normals") {
  const auto s = make_icosphere(2);
  const auto a = perturb_vertices(s, 0.01, 7);
  const auto b = perturb_vertices(s, 0.01, 7);
  const auto c = perturb_vertices(s, 0.01, 8);
  CHECK(a.vertices() == b.vertices());
  CHECK(a.vertices() != c.vertices());
  // on a sphere the vertex normal is nearly radial, so the displacement is too
  const MatrixX3 d = a.vertices() - s.vertices();
  const MatrixX3 N = vertex_normals(s);
  for (Index i = 0; i < d.rows(); ++i) {
    const Vector3 di = d.row(i), ni = N.row(i), pi = s.vertices().row(i);
    CHECK(di.cross(ni).norm() <= 1e-15);
    CHECK(ni.dot(pi) > 0.99);
  }
  CHECK(perturb_vertices(s, 0.0, 1).vertices() == s.vertices());
}

TEST_CASE("landmark files") {
  const auto pairs = parse_landmarks("# p q\n1 2\n3 4 # trailing\n\n", 5, 5);
  REQUIRE(pairs.size() == 2);
  CHECK(pairs[0] == LandmarkPair{0, 1});
  CHECK(pairs[1] == LandmarkPair{2, 3});
  CHECK_THROWS_AS(parse_landmarks("1 9\n", 5, 5), ParseError);
  CHECK_THROWS_AS(parse_landmarks("0 1\n", 5, 5), ParseError);
  CHECK_THROWS_AS(parse_landmarks("1 2 3\n", 5, 5), ParseError);
  CHECK_THROWS_AS(parse_landmarks("1 2\n1 2\n", 5, 5), ParseError);
  const auto p = temp_file("sphap_lm.txt", "2 2\n");
  CHECK(load_landmarks(p, 3, 3).front() == LandmarkPair{1, 1});
  CHECK_THROWS_AS(load_landmarks("/nonexistent/landmarks.txt", 3, 3), ParseError);
}
