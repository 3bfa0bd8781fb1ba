#pragma once

#include "sphap/mesh.hpp"
#include "sphap/stretch.hpp"
#include "sphap/types.hpp"

#include <cstdint>

namespace sphap {

/// Statistics of the per-face area ratios |f(tau)| / |tau|.
struct AreaRatioStats {
  Eigen::VectorXd ratios;
  double mean = 0.0;
  double sd = 0.0;  // population standard deviation
  double sd_over_mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

AreaRatioStats area_ratio_stats(const SimplicialSurface& surface, const MatrixX3& f,
                                Execution exec = Execution::parallel);
AreaRatioStats ratio_stats(Eigen::VectorXd ratios);

/// #V |E_A(noisy) - E_A(clean)| / sum_v ||v_noisy - v_clean||.
double authalic_error(const SimplicialSurface& noisy, const SimplicialSurface& clean,
                      double authalic_noisy, double authalic_clean);

}  // namespace sphap

namespace sphap {

struct GradientCheck {
  double max_relative_error = 0.0;  // over entries with |grad| > floor
  double max_abs_error = 0.0;
  double grad_inf_norm = 0.0;
  Index worst_vertex = -1;
  int worst_coordinate = -1;
  Index entries_checked = 0;
};

/// Compares the analytic Euclidean gradient of E with central differences.
/// Each difference only re-evaluates the faces around the perturbed vertex, so
/// roundoff stays at the scale of the local energy, not the total.
GradientCheck check_energy_gradient(const SimplicialSurface& surface, const MatrixX3& f,
                                    double step = 1e-6, double floor = 1e-8);

struct HessianCheck {
  double relative_error = 0.0;  // max |H - H_fd| / max |H|
  double asymmetry = 0.0;       // max |H - H^T|
  double translation_residual = 0.0;  // max over the three translations of ||H t||_inf
};

/// Central differences of 2 L_S(f) f against the assembled Hessian. Dense,
/// O(n) gradient evaluations: intended for small meshes.
HessianCheck check_stretch_hessian(const SimplicialSurface& surface, const MatrixX3& f,
                                   double step = 1e-6);

enum class EigenTarget { smallest_algebraic, smallest_magnitude };

struct EigenProbeOptions {
  EigenTarget target = EigenTarget::smallest_algebraic;
  int krylov_dim = 40;
  int max_restarts = 200;
  double tolerance = 1e-8;  // on ||H x - lambda x|| / ||H||_1
  std::uint64_t seed = 1;
};

struct EigenProbeResult {
  double eigenvalue = 0.0;
  Eigen::VectorXd vector;
  double residual = 0.0;  // ||H x - lambda x||_2
  int restarts = 0;
  int iterations = 0;  // operator applications
  bool converged = false;
};

/// Shift-invert Lanczos with full reorthogonalization for a sparse symmetric H.
EigenProbeResult smallest_eigenpair(const SparseMatrix& H, const EigenProbeOptions& options = {});

/// Smallest eigenpair of the stretch-energy Hessian at f.
EigenProbeResult stretch_hessian_probe(const SimplicialSurface& surface, const MatrixX3& f,
                                       const EigenProbeOptions& options = {});

}  // namespace sphap
