#pragma once

#include "sphap/objective.hpp"
#include "sphap/sphere.hpp"

#include <optional>
#include <utility>

namespace sphap {

enum class LineSearchStrategy { interpolation, bounded };

struct LineSearchOptions {
  LineSearchStrategy strategy = LineSearchStrategy::interpolation;
  double c1 = 1e-4;
  double alpha_max = 1.0;
  int max_backtracks = 30;
  /// bounded strategy: bracket tolerance (relative, in bits) and evaluation cap
  int brent_bits = 20;
  int brent_max_evaluations = 50;
};

struct LineSearchResult {
  bool success = false;
  double alpha = 0.0;
  double value = 0.0;  // phi(alpha)
  MatrixX3 point;      // R_f(alpha d)
  int evaluations = 0;
};

/// phi'(0) for phi(alpha) = E(R_f(alpha d)). Throws ContractError if d is not
/// tangent at f (|f_l . d_l| > 1e-8 for some row).
double directional_derivative(const SphericalMapping& f, const MatrixX3& direction,
                              const MatrixX3& euclidean_gradient);

/// Minimizer of the quadratic through phi(0), phi'(0), phi(alpha0), clamped to
/// [0.1, 0.5] alpha0. A zero curvature term gives alpha0 / 2.
double quadratic_step(double phi0, double dphi0, double alpha0, double phi_alpha0);

/// Coefficients (a, b) of phi0 + phi'0 x + b x^2 + a x^3 through
/// phi(alpha_p) and phi(alpha_2p).
std::pair<double, double> cubic_coefficients(double phi0, double dphi0, double alpha_p,
                                             double phi_p, double alpha_2p, double phi_2p);
/// Minimizer of the cubic through phi(0), phi'(0), phi(alpha_p), phi(alpha_2p)
/// without safeguards. Empty when the cubic has no local minimizer.
std::optional<double> cubic_minimizer(double phi0, double dphi0, double alpha_p, double phi_p,
                                      double alpha_2p, double phi_2p);

/// Safeguarded cubic step: alpha_p / 2 without a minimizer, then clamped to
/// [0.1, 0.5] alpha_p.
double cubic_step(double phi0, double dphi0, double alpha_p, double phi_p, double alpha_2p,
                  double phi_2p);

/// Backtracking search along R_f(alpha d) for the sufficient decrease
/// phi(alpha) <= phi(0) + c1 alpha phi'(0). `alpha0` is the first trial step.
/// Trial points where the objective is undefined count as +inf.
LineSearchResult line_search(const Objective& objective, const SphericalMapping& f,
                             const TangentField& direction, double phi0, double dphi0,
                             double alpha0, const LineSearchOptions& options = {});

}  // namespace sphap
