#pragma once

#include "sphap/mesh.hpp"
#include "sphap/types.hpp"

#include <complex>
#include <optional>
#include <vector>

namespace sphap {

/// Vertex images on the unit sphere; every row has unit 2-norm.
class SphericalMapping {
 public:
  static constexpr double kUnitTolerance = 1e-12;

  /// Validates row norms against `tolerance`.
  static SphericalMapping from_rows(MatrixX3 rows, double tolerance = kUnitTolerance);

  const MatrixX3& rows() const { return rows_; }
  Vector3 row(Index i) const { return rows_.row(i).transpose(); }
  Index size() const { return rows_.rows(); }

 private:
  explicit SphericalMapping(MatrixX3 rows) : rows_(std::move(rows)) {}
  friend SphericalMapping project_to_manifold(const MatrixX3& g);
  friend SphericalMapping retract(const SphericalMapping&, const struct TangentField&, double);
  friend SphericalMapping inverse_stereographic(const struct PlanarMapping&);
  MatrixX3 rows_;
};

/// Tangent vectors, row l orthogonal to row l of the base point.
struct TangentField {
  MatrixX3 vectors;
};

/// Points of the extended complex plane. At most one vertex sits at infinity;
/// its entry in `values` is unused.
struct PlanarMapping {
  std::vector<std::complex<double>> values;
  std::optional<Index> infinity;

  Index size() const { return static_cast<Index>(values.size()); }
  bool at_infinity(Index i) const { return infinity && *infinity == i; }
};

/// Row-wise (I - f_l f_l^T) g_l.
TangentField project_tangent(const SphericalMapping& f, const MatrixX3& g);

/// Row-wise (f_l + alpha xi_l) / ||f_l + alpha xi_l||.
SphericalMapping retract(const SphericalMapping& f, const TangentField& xi, double alpha = 1.0);

/// Row-wise normalization; throws on a zero row.
SphericalMapping project_to_manifold(const MatrixX3& g);

/// (x, y, z) -> (x + iy) / (1 - z); the north pole goes to infinity.
PlanarMapping stereographic(const SphericalMapping& f);

/// u + iv -> (2u, 2v, u^2 + v^2 - 1) / (u^2 + v^2 + 1); infinity -> north pole.
SphericalMapping inverse_stereographic(const PlanarMapping& h);

/// z -> 1 / conj(z), exchanging 0 and infinity.
PlanarMapping invert_plane(const PlanarMapping& h);

struct FoldReport {
  Index folds = 0;       // det[f_i f_j f_k] < 0
  Index degenerate = 0;  // det == 0
};

FoldReport fold_report(const SimplicialSurface& surface, const MatrixX3& f,
                       Execution exec = Execution::parallel);
Index count_folds(const SimplicialSurface& surface, const SphericalMapping& f,
                  Execution exec = Execution::parallel);

}  // namespace sphap
