#pragma once

// Per-face and per-vertex loops shared by the energy, fold and metric code.
// Every kernel has a serial reference loop and an OpenMP loop. Both write one
// slot per face; reductions happen afterwards in a fixed order, so the two
// paths agree bit for bit.

#include "sphap/mesh.hpp"
#include "sphap/types.hpp"

namespace sphap::kernels {

/// Image faces with area at or below this are treated as degenerate.
inline constexpr double kDegenerateArea = 1e-14;

using FaceWeights = Eigen::Matrix<double, Eigen::Dynamic, 3>;
using FacePartials = Eigen::Matrix<double, Eigen::Dynamic, 9>;

/// Quantities of one image triangle f([v_i, v_j, v_k]).
struct FaceGeometry {
  double image_area = 0.0;  // |f(tau)|
  double a12 = 0.0;         // signed areas of the projections onto the xy, xz, yz planes
  double a13 = 0.0;
  double a23 = 0.0;
  Vector3 cotangents = Vector3::Zero();  // at corners i, j, k
  /// Modified cotangent weights cot(theta) |f(tau)| / (2 |tau|); entry c belongs
  /// to the edge opposite corner c.
  Vector3 weights = Vector3::Zero();
  /// d|f(tau)|/d f_corner^s stored at 3 * s + corner.
  Eigen::Matrix<double, 9, 1> area_partials = Eigen::Matrix<double, 9, 1>::Zero();
  bool degenerate = false;
};

/// Evaluates one face. `reference_area` is |tau| on the input mesh.
FaceGeometry evaluate_face(const Vector3& fi, const Vector3& fj, const Vector3& fk,
                           double reference_area, bool with_partials = true);

struct FaceTerms {
  Eigen::VectorXd image_area;  // |f(tau)|
  Eigen::VectorXd stretch;     // |f(tau)|^2 / |tau|
  FaceWeights weights;
  FacePartials area_partials;  // empty unless requested
};

/// Throws DegenerateFaceError naming the lowest-index degenerate face.
FaceTerms face_terms_serial(const SimplicialSurface& surface, const MatrixX3& f,
                            bool with_partials);
FaceTerms face_terms_parallel(const SimplicialSurface& surface, const MatrixX3& f,
                              bool with_partials);
FaceTerms face_terms(const SimplicialSurface& surface, const MatrixX3& f, bool with_partials,
                     Execution exec);

/// det[f_i f_j f_k] per face.
Eigen::VectorXd face_orientations_serial(const SimplicialSurface& surface, const MatrixX3& f);
Eigen::VectorXd face_orientations_parallel(const SimplicialSurface& surface, const MatrixX3& f);

/// |f(tau)| / |tau| per face (no degeneracy check).
Eigen::VectorXd area_ratios_serial(const SimplicialSurface& surface, const MatrixX3& f);
Eigen::VectorXd area_ratios_parallel(const SimplicialSurface& surface, const MatrixX3& f);
Eigen::VectorXd area_ratios(const SimplicialSurface& surface, const MatrixX3& f, Execution exec);

/// Sparse Laplacian with off-diagonal (a, b) = -sum of the weights of edge
/// [a, b] and diagonal = minus the off-diagonal row sum. Each entry is summed
/// in sorted order, so the result does not depend on the face order.
SparseMatrix laplacian_from_weights(const SimplicialSurface& surface, const FaceWeights& weights);

/// Accumulates per-face corner partials into an n x 3 array, in face order.
MatrixX3 scatter_partials(const SimplicialSurface& surface, const FacePartials& partials);

/// Neumaier-compensated sum in index order.
double ordered_sum(const Eigen::VectorXd& values);

}  // namespace sphap::kernels
