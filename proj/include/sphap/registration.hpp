#pragma once

#include "sphap/mesh.hpp"
#include "sphap/objective.hpp"
#include "sphap/rgd.hpp"
#include "sphap/sphere.hpp"

#include <vector>

namespace sphap {

/// E_R(h) = E_S(h) + lambda sum_i ||h(p_i) - c_i||^2 on a spherical mesh.
class LandmarkObjective final : public Objective {
 public:
  LandmarkObjective(const SimplicialSurface& sphere_mesh, std::vector<int> landmarks,
                    MatrixX3 targets, double lambda, Execution exec = Execution::parallel);

  double value(const MatrixX3& h) const override;
  double value_and_gradient(const MatrixX3& h, MatrixX3& gradient) const override;
  double penalty(const MatrixX3& h) const;

 private:
  const SimplicialSurface& mesh_;
  std::vector<int> landmarks_;
  MatrixX3 targets_;
  double lambda_;
  Execution exec_;
};

/// Mean great-circle distance between rows a(i) and b(j) over index pairs.
double mean_geodesic_distance(const MatrixX3& a, const std::vector<int>& ia, const MatrixX3& b,
                              const std::vector<int>& ib);

/// Triangle containing a query direction, with barycentric weights.
struct SurfaceLocation {
  Index face = -1;
  Vector3 weights = Vector3::Zero();
  bool exact = true;  // false when the nearest face was used as a fallback
};

/// Point location on a closed triangulated sphere by central projection.
class SphereLocator {
 public:
  SphereLocator(const MatrixX3& vertices, const FaceMatrix& faces);
  SurfaceLocation locate(const Vector3& direction) const;

 private:
  bool barycentric(Index t, const Vector3& q, Vector3& w) const;
  Index cell_of(const Vector3& p) const;

  const MatrixX3& vertices_;
  const FaceMatrix& faces_;
  int res_ = 1;
  std::vector<std::vector<int>> cells_;
};

struct RegistrationOptions {
  double lambda = 10.0;
  int max_iters = 200;
  double mismatch_tol = 1e-6;
  bool normalize_midpoints = true;
  LineSearchOptions line_search;
  Execution exec = Execution::parallel;
};

struct CompositeVertex {
  Index face = -1;
  Vector3 weights = Vector3::Zero();
};

struct RegistrationResult {
  SphericalMapping h0;  // aligned spherical map of M0 (rows indexed like M0)
  SphericalMapping h1;
  MatrixX3 targets;     // landmark midpoints c_i
  double mismatch_before = 0.0;
  double mismatch_after = 0.0;
  RgdStatus status0 = RgdStatus::max_iters;
  RgdStatus status1 = RgdStatus::max_iters;
  int iterations0 = 0;
  int iterations1 = 0;
  /// g : M0 -> M1 and the face/weights used for each vertex
  MatrixX3 composed;
  std::vector<CompositeVertex> locations;
  Index fallback_locations = 0;
};

/// Aligns f0 : M0 -> S^2 and f1 : M1 -> S^2 at the landmark pairs, then
/// composes g = h1^-1 o h0 by point location in the aligned image of M1.
RegistrationResult register_surfaces(const SimplicialSurface& m0, const SphericalMapping& f0,
                                     const SimplicialSurface& m1, const SphericalMapping& f1,
                                     const std::vector<LandmarkPair>& landmarks,
                                     const RegistrationOptions& options = {});

struct Composition {
  MatrixX3 points;
  std::vector<CompositeVertex> locations;
  Index fallbacks = 0;
};

/// For each row of `query` (on the sphere), the point of M1 whose image under
/// h1 it is.
Composition compose_maps(const MatrixX3& query, const SimplicialSurface& m1,
                         const SphericalMapping& h1);

/// H(v, t) = (1 - t) v + t g(v).
MatrixX3 homotopy(const MatrixX3& source, const MatrixX3& target, double t);

}  // namespace sphap
