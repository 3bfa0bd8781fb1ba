#pragma once

#include "sphap/types.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace sphap {

enum class TopologyCheck {
  strict,      // closed 2-manifold with Euler characteristic 2
  warn_genus,  // closed 2-manifold, genus mismatch only recorded as a warning
  none,        // index checks only; used for open patches in tests and internal meshes
};

struct Edge {
  int a;
  int b;  // a < b
  bool operator==(const Edge&) const = default;
};

/// Triangle mesh with derived edges and reference areas. Immutable once built.
class SimplicialSurface {
 public:
  SimplicialSurface(MatrixX3 vertices, FaceMatrix faces,
                    TopologyCheck check = TopologyCheck::strict);

  const MatrixX3& vertices() const { return vertices_; }
  const FaceMatrix& faces() const { return faces_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const Eigen::VectorXd& face_areas() const { return face_areas_; }
  double total_area() const { return total_area_; }

  Index num_vertices() const { return vertices_.rows(); }
  Index num_faces() const { return faces_.rows(); }
  Index num_edges() const { return static_cast<Index>(edges_.size()); }
  int euler_characteristic() const {
    return static_cast<int>(num_vertices() - num_edges() + num_faces());
  }

  /// Faces incident to vertex v, in increasing face order.
  std::vector<int> incident_faces(Index v) const;
  /// Vertices adjacent to v, sorted.
  std::vector<int> neighbors(Index v) const;

  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  MatrixX3 vertices_;
  FaceMatrix faces_;
  std::vector<Edge> edges_;
  Eigen::VectorXd face_areas_;
  double total_area_ = 0.0;
  // CSR vertex -> incident faces
  std::vector<int> vf_offsets_;
  std::vector<int> vf_faces_;
  std::vector<std::string> warnings_;
};

enum class MeshFormat { obj, off, automatic };

SimplicialSurface load_mesh(const std::filesystem::path& path,
                            MeshFormat format = MeshFormat::automatic,
                            TopologyCheck check = TopologyCheck::strict);

/// Parses mesh text directly; `format` must not be automatic.
SimplicialSurface parse_mesh(const std::string& text, MeshFormat format,
                             TopologyCheck check = TopologyCheck::strict);

/// Writes `vertices` with `faces` (full double precision).
void save_mesh(const std::filesystem::path& path, const MatrixX3& vertices,
               const FaceMatrix& faces, MeshFormat format = MeshFormat::automatic);
void save_mesh(const std::filesystem::path& path, const SimplicialSurface& surface,
               MeshFormat format = MeshFormat::automatic);

/// Subdivided icosahedron projected to the unit sphere, then scaled per axis.
/// Vertex order is deterministic: the 12 icosahedron vertices first, then
/// edge midpoints in order of first appearance.
SimplicialSurface make_icosphere(int subdivisions, const Vector3& radii = Vector3::Ones());

/// Unit icosphere with radial bumps r = 1 + amplitude * sin(k x) sin(k y) sin(k z).
SimplicialSurface make_bumpy_sphere(int subdivisions, double amplitude, double frequency);

/// Displaces every vertex along its vertex normal by N(0, sigma^2).
SimplicialSurface perturb_vertices(const SimplicialSurface& surface, double sigma_noise,
                                   std::uint64_t seed);

/// Unit vertex normals: normalized average of the unit normals of incident faces.
MatrixX3 vertex_normals(const SimplicialSurface& surface);

struct LandmarkPair {
  int source_index;  // vertex of M0, 0-based
  int target_index;  // vertex of M1, 0-based
  bool operator==(const LandmarkPair&) const = default;
};

/// One `i j` pair per line, 1-based, `#` starts a comment.
std::vector<LandmarkPair> parse_landmarks(const std::string& text, Index source_vertices,
                                          Index target_vertices);
std::vector<LandmarkPair> load_landmarks(const std::filesystem::path& path,
                                         Index source_vertices, Index target_vertices);

}  // namespace sphap
