#pragma once

#include "sphap/mesh.hpp"
#include "sphap/stretch.hpp"
#include "sphap/types.hpp"

namespace sphap {

/// Smooth function on (S^2)^n extended to R^{n x 3}, with Euclidean gradient.
class Objective {
 public:
  virtual ~Objective() = default;
  /// Throws NumericalError where the function is undefined.
  virtual double value(const MatrixX3& f) const = 0;
  virtual double value_and_gradient(const MatrixX3& f, MatrixX3& gradient) const = 0;
  /// Quantity watched by the stall test; defaults to the value itself.
  virtual double stall_measure(const MatrixX3& f, double value) const {
    (void)f;
    return value;
  }
};

/// E(f) = |M| E_S(f) / A(f); stall test on E(f) - A(f).
class NormalizedStretchObjective final : public Objective {
 public:
  explicit NormalizedStretchObjective(const SimplicialSurface& surface,
                                      Execution exec = Execution::parallel)
      : surface_(surface), exec_(exec) {}

  double value(const MatrixX3& f) const override {
    return stretch_energy(surface_, f, exec_).normalized;
  }
  double value_and_gradient(const MatrixX3& f, MatrixX3& gradient) const override {
    auto eg = normalized_energy_gradient(surface_, f, exec_);
    gradient = std::move(eg.gradient);
    return eg.energy.normalized;
  }
  double stall_measure(const MatrixX3& f, double value) const override {
    return value - image_area(surface_, f, exec_);
  }

 private:
  const SimplicialSurface& surface_;
  Execution exec_;
};

}  // namespace sphap
