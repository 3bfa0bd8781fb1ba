#include "sphap/mesh.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <random>
#include <tuple>

namespace sphap {

namespace {

std::string edge_name(int a, int b) {
  return "(" + std::to_string(a) + ", " + std::to_string(b) + ")";
}

}  // namespace

SimplicialSurface::SimplicialSurface(MatrixX3 vertices, FaceMatrix faces, TopologyCheck check)
    : vertices_(std::move(vertices)), faces_(std::move(faces)) {
  const Index n = vertices_.rows();
  const Index m = faces_.rows();
  if (n == 0 || m == 0) throw TopologyError("empty mesh");
  if (!vertices_.allFinite()) throw TopologyError("non-finite vertex coordinate");

  for (Index t = 0; t < m; ++t) {
    for (int c = 0; c < 3; ++c) {
      const int v = faces_(t, c);
      if (v < 0 || v >= n) {
        throw TopologyError("face " + std::to_string(t) + " references out-of-range vertex " +
                            std::to_string(v));
      }
    }
    if (faces_(t, 0) == faces_(t, 1) || faces_(t, 1) == faces_(t, 2) ||
        faces_(t, 0) == faces_(t, 2)) {
      throw TopologyError("degenerate face " + std::to_string(t) + " repeats a vertex index");
    }
  }

  // Undirected edges with incidence counts, sorted for a deterministic order.
  std::vector<std::pair<Edge, int>> half;
  half.reserve(3 * m);
  for (Index t = 0; t < m; ++t) {
    for (int c = 0; c < 3; ++c) {
      int a = faces_(t, c);
      int b = faces_(t, (c + 1) % 3);
      if (a > b) std::swap(a, b);
      half.push_back({Edge{a, b}, 1});
    }
  }
  std::sort(half.begin(), half.end(), [](const auto& x, const auto& y) {
    return std::tie(x.first.a, x.first.b) < std::tie(y.first.a, y.first.b);
  });
  for (std::size_t i = 0; i < half.size();) {
    std::size_t j = i;
    while (j < half.size() && half[j].first == half[i].first) ++j;
    const auto count = static_cast<int>(j - i);
    const Edge e = half[i].first;
    if (check != TopologyCheck::none) {
      if (count == 1) throw TopologyError("open surface: boundary edge " + edge_name(e.a, e.b));
      if (count > 2) throw TopologyError("non-manifold edge " + edge_name(e.a, e.b));
    }
    edges_.push_back(e);
    i = j;
  }

  if (check != TopologyCheck::none) {
    const int chi = euler_characteristic();
    if (chi != 2) {
      const std::string msg =
          "genus != 0: Euler characteristic V - E + F = " + std::to_string(chi);
      if (check == TopologyCheck::strict) throw TopologyError(msg);
      warnings_.push_back(msg);
    }
  }

  face_areas_.resize(m);
  for (Index t = 0; t < m; ++t) {
    const Vector3 p0 = vertices_.row(faces_(t, 0));
    const Vector3 p1 = vertices_.row(faces_(t, 1));
    const Vector3 p2 = vertices_.row(faces_(t, 2));
    face_areas_[t] = 0.5 * (p1 - p0).cross(p2 - p0).norm();
  }
  total_area_ = face_areas_.sum();
  if (!(total_area_ > 0.0)) throw TopologyError("mesh has zero total area");

  vf_offsets_.assign(n + 1, 0);
  for (Index t = 0; t < m; ++t)
    for (int c = 0; c < 3; ++c) ++vf_offsets_[faces_(t, c) + 1];
  for (Index v = 0; v < n; ++v) vf_offsets_[v + 1] += vf_offsets_[v];
  vf_faces_.resize(3 * m);
  std::vector<int> cursor(vf_offsets_.begin(), vf_offsets_.end() - 1);
  for (Index t = 0; t < m; ++t)
    for (int c = 0; c < 3; ++c) vf_faces_[cursor[faces_(t, c)]++] = static_cast<int>(t);
}

std::vector<int> SimplicialSurface::incident_faces(Index v) const {
  return {vf_faces_.begin() + vf_offsets_[v], vf_faces_.begin() + vf_offsets_[v + 1]};
}

std::vector<int> SimplicialSurface::neighbors(Index v) const {
  std::vector<int> out;
  for (int t : incident_faces(v))
    for (int c = 0; c < 3; ++c)
      if (faces_(t, c) != v) out.push_back(faces_(t, c));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

SimplicialSurface make_icosphere(int subdivisions, const Vector3& radii) {
  if (subdivisions < 0) throw ContractError("subdivisions must be >= 0");
  if ((radii.array() <= 0.0).any()) throw ContractError("radii must be positive");

  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vector3> verts = {
      {-1, phi, 0}, {1, phi, 0},  {-1, -phi, 0}, {1, -phi, 0}, {0, -1, phi},  {0, 1, phi},
      {0, -1, -phi}, {0, 1, -phi}, {phi, 0, -1},  {phi, 0, 1},  {-phi, 0, -1}, {-phi, 0, 1}};
  for (auto& v : verts) v.normalize();
  std::vector<std::array<int, 3>> faces = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
      {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
      {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};

  for (int level = 0; level < subdivisions; ++level) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      verts.push_back((verts[a] + verts[b]).normalized());
      const int id = static_cast<int>(verts.size()) - 1;
      midpoint.emplace(key, id);
      return id;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(faces.size() * 4);
    for (const auto& f : faces) {
      const int ab = mid(f[0], f[1]);
      const int bc = mid(f[1], f[2]);
      const int ca = mid(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    faces = std::move(next);
  }

  MatrixX3 V(verts.size(), 3);
  for (std::size_t i = 0; i < verts.size(); ++i)
    V.row(i) = verts[i].cwiseProduct(radii).transpose();
  FaceMatrix F(faces.size(), 3);
  for (std::size_t t = 0; t < faces.size(); ++t)
    F.row(t) << faces[t][0], faces[t][1], faces[t][2];
  return SimplicialSurface(std::move(V), std::move(F));
}

SimplicialSurface make_bumpy_sphere(int subdivisions, double amplitude, double frequency) {
  if (std::abs(amplitude) >= 1.0) throw ContractError("bump amplitude must be below 1");
  const SimplicialSurface sphere = make_icosphere(subdivisions);
  MatrixX3 V = sphere.vertices();
  for (Index i = 0; i < V.rows(); ++i) {
    const Vector3 p = V.row(i);
    const double r = 1.0 + amplitude * std::sin(frequency * p.x()) *
                               std::sin(frequency * p.y()) * std::sin(frequency * p.z());
    V.row(i) *= r;
  }
  return SimplicialSurface(std::move(V), sphere.faces());
}

MatrixX3 vertex_normals(const SimplicialSurface& surface) {
  const auto& V = surface.vertices();
  const auto& F = surface.faces();
  MatrixX3 N = MatrixX3::Zero(V.rows(), 3);
  for (Index t = 0; t < F.rows(); ++t) {
    const Vector3 p0 = V.row(F(t, 0));
    const Vector3 p1 = V.row(F(t, 1));
    const Vector3 p2 = V.row(F(t, 2));
    Vector3 n = (p1 - p0).cross(p2 - p0);
    const double len = n.norm();
    if (len == 0.0) continue;
    n /= len;
    for (int c = 0; c < 3; ++c) N.row(F(t, c)) += n.transpose();
  }
  for (Index i = 0; i < N.rows(); ++i) {
    const double len = N.row(i).norm();
    if (len > 0.0) N.row(i) /= len;
  }
  return N;
}

SimplicialSurface perturb_vertices(const SimplicialSurface& surface, double sigma_noise,
                                   std::uint64_t seed) {
  if (sigma_noise < 0.0) throw ContractError("sigma_noise must be >= 0");
  MatrixX3 V = surface.vertices();
  if (sigma_noise > 0.0) {
    const MatrixX3 N = vertex_normals(surface);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, sigma_noise);
    for (Index i = 0; i < V.rows(); ++i) V.row(i) += noise(rng) * N.row(i);
  }
  return SimplicialSurface(std::move(V), surface.faces(), TopologyCheck::warn_genus);
}

}  // namespace sphap
