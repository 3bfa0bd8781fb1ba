#include "sphap/rgd.hpp"

#include "sphap/diagnostics.hpp"

#include <chrono>
#include <cmath>
#include <limits>

namespace sphap {

std::string to_string(RgdStatus status) {
  switch (status) {
    case RgdStatus::grad_converged:
      return "grad_converged";
    case RgdStatus::energy_stalled:
      return "energy_stalled";
    case RgdStatus::max_iters:
      return "max_iters";
    case RgdStatus::line_search_failed:
      return "line_search_failed";
    case RgdStatus::target_reached:
      return "target_reached";
  }
  return "unknown";
}

DescentResult riemannian_descent(
    const Objective& objective, const SphericalMapping& f0, const RgdConfig& config,
    const std::function<void(const DescentStep&, const MatrixX3&)>& on_step) {
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  const double grad_tol =
      config.grad_tol < 0.0 ? 1e-6 * std::sqrt(static_cast<double>(f0.size())) : config.grad_tol;

  SphericalMapping f = f0;
  MatrixX3 egrad;
  double value = objective.value_and_gradient(f.rows(), egrad);
  TangentField rgrad = project_tangent(f, egrad);
  double gnorm = rgrad.vectors.norm();
  double measure = objective.stall_measure(f.rows(), value);

  DescentResult out;
  out.initial_grad_norm = gnorm;
  out.status = RgdStatus::max_iters;
  if (grad_tol > 0.0 && gnorm < grad_tol) {
    out.status = RgdStatus::grad_converged;
    out.f = f.rows();
    out.value = value;
    return out;
  }

  double prev_value = std::numeric_limits<double>::quiet_NaN();
  int quiet = 0;
  for (int k = 1; k <= config.max_iters; ++k) {
    TangentField d{-rgrad.vectors};
    const double dphi0 = directional_derivative(f, d.vectors, egrad);
    double alpha0 = config.line_search.alpha_max;
    if (k > 1) {
      const double guess = 2.0 * (value - prev_value) / dphi0;
      if (std::isfinite(guess) && guess > 0.0) alpha0 = std::min(alpha0, guess);
    }
    if (!(dphi0 < 0.0)) {
      // the gradient vanished to roundoff
      out.status = RgdStatus::grad_converged;
      break;
    }
    auto ls = line_search(objective, f, d, value, dphi0, alpha0, config.line_search);
    if (!ls.success) {
      out.status = RgdStatus::line_search_failed;
      break;
    }
    prev_value = value;
    f = SphericalMapping::from_rows(std::move(ls.point), 1e-10);
    value = objective.value_and_gradient(f.rows(), egrad);
    rgrad = project_tangent(f, egrad);
    gnorm = rgrad.vectors.norm();
    out.iterations = k;

    DescentStep step;
    step.iter = k;
    step.value = value;
    step.grad_norm = gnorm;
    step.alpha = ls.alpha;
    step.elapsed_s = std::chrono::duration<double>(clock::now() - start).count();
    out.steps.push_back(step);
    if (on_step) on_step(step, f.rows());

    if (config.stop_when && config.stop_when(f.rows())) {
      out.status = RgdStatus::target_reached;
      break;
    }
    if (grad_tol > 0.0 && gnorm < grad_tol) {
      out.status = RgdStatus::grad_converged;
      break;
    }
    const double next_measure = objective.stall_measure(f.rows(), value);
    if (config.energy_tol > 0.0) {
      quiet = std::abs(next_measure - measure) < config.energy_tol ? quiet + 1 : 0;
      if (quiet >= config.stall_window) {
        out.status = RgdStatus::energy_stalled;
        measure = next_measure;
        break;
      }
    }
    measure = next_measure;
  }
  out.f = f.rows();
  out.value = value;
  return out;
}

MinimizeResult minimize_stretch(const SimplicialSurface& surface, const SphericalMapping& f0,
                                const RgdConfig& config, Execution exec) {
  const NormalizedStretchObjective objective(surface, exec);
  std::vector<IterationRecord> records;
  const auto result = riemannian_descent(
      objective, f0, config, [&](const DescentStep& step, const MatrixX3& f) {
        const auto e = stretch_energy(surface, f, exec);
        IterationRecord r;
        r.iter = step.iter;
        r.stretch = e.stretch;
        r.authalic = e.authalic;
        r.normalized = e.normalized;
        r.sd_over_mean = area_ratio_stats(surface, f, exec).sd_over_mean;
        r.grad_norm = step.grad_norm;
        r.alpha = step.alpha;
        r.folds = fold_report(surface, f, exec).folds;
        r.elapsed_s = step.elapsed_s;
        records.push_back(r);
      });
  return {SphericalMapping::from_rows(result.f, 1e-10), result.status, result.iterations,
          std::move(records)};
}

}  // namespace sphap
