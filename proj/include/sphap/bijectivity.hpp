#pragma once

#include "sphap/fpi.hpp"
#include "sphap/mesh.hpp"
#include "sphap/sphere.hpp"

#include <functional>

namespace sphap {

/// Mean value Laplacian of a planar mesh: row i carries tan(phi/2) / |h_i - h_j|
/// for every face corner angle phi at h_i. Generally unsymmetric. Faces touching
/// the vertex at infinity contribute nothing.
SparseMatrix assemble_mean_value_laplacian(const SimplicialSurface& surface,
                                           const PlanarMapping& h,
                                           Execution exec = Execution::parallel);

using PassObserver = std::function<void(const PlanarMapping& before, const PlanarMapping& after,
                                        const RadiusSplit& split)>;

/// Re-solves the vertices with |h| < radius against the mean value Laplacian of h.
PlanarMapping unfold_pass(const SimplicialSurface& surface, const PlanarMapping& h,
                          double radius, Execution exec = Execution::parallel,
                          const PassObserver& observer = {});

struct BijectivityOptions {
  double radius = 1.2;
  int max_sweeps = 3;
  Execution exec = Execution::parallel;
  PassObserver observer;
};

struct BijectivityResult {
  SphericalMapping f;
  Index folds_before = 0;
  Index folds_after = 0;
  int sweeps = 0;
};

/// Sweeps of (pass on the southern disk, invert, pass, invert back, lift) until
/// no folds remain or max_sweeps is reached. At least one sweep always runs.
BijectivityResult correct_bijectivity(const SimplicialSurface& surface, const SphericalMapping& f,
                                      const BijectivityOptions& options = {});

}  // namespace sphap
