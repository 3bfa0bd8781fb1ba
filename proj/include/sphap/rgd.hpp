#pragma once

#include "sphap/line_search.hpp"
#include "sphap/mesh.hpp"
#include "sphap/objective.hpp"
#include "sphap/sphere.hpp"

#include <functional>
#include <string>
#include <vector>

namespace sphap {

enum class RgdStatus {
  grad_converged,
  energy_stalled,
  max_iters,
  line_search_failed,
  target_reached,  // stop_when returned true
};

std::string to_string(RgdStatus status);

struct RgdConfig {
  int max_iters = 100;
  /// Stop when ||grad_R E||_F falls below this; negative means 1e-6 sqrt(n),
  /// zero disables the test.
  double grad_tol = -1.0;
  /// Stop when |change in the stall measure| stays below this for
  /// `stall_window` consecutive iterations; zero disables the test.
  double energy_tol = 1e-12;
  int stall_window = 3;
  LineSearchOptions line_search;
  /// Optional early exit, checked after every accepted step.
  std::function<bool(const MatrixX3&)> stop_when;
};

/// State after an accepted step.
struct DescentStep {
  int iter = 0;  // 1-based
  double value = 0.0;
  double grad_norm = 0.0;  // Riemannian gradient at the new point
  double alpha = 0.0;
  double elapsed_s = 0.0;
};

struct DescentResult {
  MatrixX3 f;
  RgdStatus status = RgdStatus::max_iters;
  int iterations = 0;
  double value = 0.0;
  double initial_grad_norm = 0.0;
  std::vector<DescentStep> steps;
};

/// Riemannian gradient descent on (S^2)^n with the normalization retraction.
/// `on_step` sees every accepted iterate.
DescentResult riemannian_descent(
    const Objective& objective, const SphericalMapping& f0, const RgdConfig& config,
    const std::function<void(const DescentStep&, const MatrixX3&)>& on_step = {});

/// One row of the optimization log.
struct IterationRecord {
  int iter = 0;
  double stretch = 0.0;     // E_S
  double authalic = 0.0;    // E_A
  double normalized = 0.0;  // E
  double sd_over_mean = 0.0;
  double grad_norm = 0.0;  // NaN for rows without a gradient step
  double alpha = 0.0;      // NaN for rows without a gradient step
  Index folds = 0;
  double elapsed_s = 0.0;
};

struct MinimizeResult {
  SphericalMapping f;
  RgdStatus status;
  int iterations;
  std::vector<IterationRecord> records;
};

/// Minimizes the normalized stretch energy of `surface` from f0.
MinimizeResult minimize_stretch(const SimplicialSurface& surface, const SphericalMapping& f0,
                                const RgdConfig& config = {},
                                Execution exec = Execution::parallel);

}  // namespace sphap
