#pragma once

#include "sphap/mesh.hpp"
#include "sphap/sphere.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace sphap {

/// Vertices with |h| < radius are interior; the rest (and the vertex at
/// infinity, if any) are boundary.
struct RadiusSplit {
  std::vector<Index> interior;
  std::vector<Index> boundary;
};
RadiusSplit split_by_radius(const PlanarMapping& h, double radius);

/// Median of |h| over finite vertices; the average of the middle two for an
/// even count.
double median_magnitude(const PlanarMapping& h);

/// Solves L_II h_I = -L_IB h_B for the interior values, keeping boundary values.
/// Throws NumericalError if an interior vertex couples to the vertex at infinity.
PlanarMapping solve_dirichlet(const SparseMatrix& L, const PlanarMapping& h,
                              const RadiusSplit& split);

/// One sweep of the fixed-point update with fixed L: invert, split at
/// `radius`, harmonic solve, rescale by the median magnitude.
PlanarMapping fpi_step(const SparseMatrix& L, const PlanarMapping& h, double radius,
                       const std::function<void(const PlanarMapping&, const PlanarMapping&,
                                                const RadiusSplit&)>& on_solve = {});

struct FpiOptions {
  int max_iters = 10;
  double radius = 1.2;
  /// Stop once the stretch-energy decrease falls to or below this.
  std::optional<double> epsilon;
  /// Return the iterate before the first increase of E_A.
  bool stop_on_increase = true;
  Execution exec = Execution::parallel;
  /// Called after every harmonic solve with the inverted input and the solution.
  std::function<void(const PlanarMapping& before, const PlanarMapping& after,
                     const RadiusSplit& split)>
      on_solve;
};

struct FpiRecord {
  int iter = 0;
  double stretch = 0.0;
  double authalic = 0.0;
  double normalized = 0.0;
  double sd_over_mean = 0.0;
  Index folds = 0;
  double elapsed_s = 0.0;
};

struct FpiResult {
  SphericalMapping f;
  /// One row per executed iteration, including an iteration whose result was
  /// discarded because E_A increased.
  std::vector<FpiRecord> records;
  std::optional<int> first_increase_iter;  // 1-based
  int accepted_iters = 0;
  std::string stop_reason;
};

FpiResult fixed_point_iteration(const SimplicialSurface& surface, const SphericalMapping& f0,
                                const FpiOptions& options = {});

struct ConformalOptions {
  /// Face sent to the outside of the plane; default: largest reference area.
  std::optional<Index> puncture_face;
};

/// Harmonic map of the mesh minus one face onto a triangle, centered and
/// scaled to median radius 1, then lifted by inverse stereographic projection.
SphericalMapping conformal_initial_map(const SimplicialSurface& surface,
                                       const ConformalOptions& options = {});

}  // namespace sphap
