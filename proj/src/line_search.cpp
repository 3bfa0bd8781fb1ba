#include "sphap/line_search.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

namespace sphap {

double directional_derivative(const SphericalMapping& f, const MatrixX3& direction,
                              const MatrixX3& euclidean_gradient) {
  const MatrixX3& F = f.rows();
  if (direction.rows() != F.rows() || euclidean_gradient.rows() != F.rows())
    throw ContractError("directional_derivative: row count mismatch");
  double sum = 0.0;
  for (Index l = 0; l < F.rows(); ++l) {
    const Vector3 fl = F.row(l);
    const Vector3 dl = direction.row(l);
    const double fd = fl.dot(dl);
    if (std::abs(fd) > 1e-8)
      throw ContractError("search direction is not tangent at row " + std::to_string(l));
    const double len = fl.norm();
    // derivative of (f + a d) / |f + a d| at a = 0
    const Vector3 dpsi = dl / len - (fd / (len * len * len)) * fl;
    sum += euclidean_gradient.row(l).dot(dpsi.transpose());
  }
  return sum;
}

double quadratic_step(double phi0, double dphi0, double alpha0, double phi_alpha0) {
  const double denom = phi_alpha0 - phi0 - dphi0 * alpha0;
  double a = denom == 0.0 ? 0.5 * alpha0 : -dphi0 * alpha0 * alpha0 / (2.0 * denom);
  if (std::isnan(a)) a = 0.5 * alpha0;
  return std::clamp(a, 0.1 * alpha0, 0.5 * alpha0);
}

std::pair<double, double> cubic_coefficients(double phi0, double dphi0, double alpha_p,
                                             double phi_p, double alpha_2p, double phi_2p) {
  const double r1 = phi_p - phi0 - dphi0 * alpha_p;
  const double r2 = phi_2p - phi0 - dphi0 * alpha_2p;
  const double scale = 1.0 / (alpha_p - alpha_2p);
  const double p2 = alpha_p * alpha_p;
  const double q2 = alpha_2p * alpha_2p;
  const double a = scale * (r1 / p2 - r2 / q2);
  const double b = scale * (-alpha_2p * r1 / p2 + alpha_p * r2 / q2);
  return {a, b};
}

std::optional<double> cubic_minimizer(double phi0, double dphi0, double alpha_p, double phi_p,
                                      double alpha_2p, double phi_2p) {
  const auto [a, b] = cubic_coefficients(phi0, dphi0, alpha_p, phi_p, alpha_2p, phi_2p);
  if (!std::isfinite(a) || !std::isfinite(b)) return std::nullopt;

  double x;
  if (std::abs(a) <= 1e-14 * std::max(std::abs(b), 1e-300)) {
    if (!(b > 0.0)) return std::nullopt;
    x = -dphi0 / (2.0 * b);
  } else {
    const double disc = b * b - 3.0 * a * dphi0;
    if (disc < 0.0) return std::nullopt;
    x = (-b + std::sqrt(disc)) / (3.0 * a);
  }
  if (!std::isfinite(x)) return std::nullopt;
  return x;
}

double cubic_step(double phi0, double dphi0, double alpha_p, double phi_p, double alpha_2p,
                  double phi_2p) {
  const auto x = cubic_minimizer(phi0, dphi0, alpha_p, phi_p, alpha_2p, phi_2p);
  const double a = x ? *x : 0.5 * alpha_p;
  return std::clamp(a, 0.1 * alpha_p, 0.5 * alpha_p);
}

namespace {

struct Trial {
  double value;
  MatrixX3 point;
};

class Evaluator {
 public:
  Evaluator(const Objective& obj, const SphericalMapping& f, const TangentField& d)
      : obj_(obj), f_(f), d_(d) {}

  Trial operator()(double alpha) {
    ++count;
    try {
      const auto g = retract(f_, d_, alpha);
      const double v = obj_.value(g.rows());
      return {std::isnan(v) ? std::numeric_limits<double>::infinity() : v, g.rows()};
    } catch (const NumericalError&) {
      return {std::numeric_limits<double>::infinity(), MatrixX3()};
    }
  }

  int count = 0;

 private:
  const Objective& obj_;
  const SphericalMapping& f_;
  const TangentField& d_;
};

}  // namespace

LineSearchResult line_search(const Objective& objective, const SphericalMapping& f,
                             const TangentField& direction, double phi0, double dphi0,
                             double alpha0, const LineSearchOptions& options) {
  if (!(dphi0 < 0.0)) throw ContractError("line search needs a descent direction");
  Evaluator eval(objective, f, direction);
  auto armijo = [&](double a, double v) {
    return std::isfinite(v) && v <= phi0 + options.c1 * a * dphi0;
  };

  LineSearchResult out;
  out.point = f.rows();
  out.value = phi0;

  double alpha = std::min(alpha0, options.alpha_max);
  if (!(alpha > 0.0)) alpha = options.alpha_max;
  Trial trial{0.0, MatrixX3()};

  if (options.strategy == LineSearchStrategy::bounded) {
    const double penalty = phi0 + 1e10 * (1.0 + std::abs(phi0));
    std::uintmax_t iters = static_cast<std::uintmax_t>(options.brent_max_evaluations);
    const auto [a_star, v_star] = boost::math::tools::brent_find_minima(
        [&](double a) {
          const double v = eval(a).value;
          return std::isfinite(v) ? v : penalty;
        },
        0.0, options.alpha_max, options.brent_bits, iters);
    (void)v_star;
    if (a_star > 1e-12 * options.alpha_max) alpha = a_star;
  }

  trial = eval(alpha);
  if (armijo(alpha, trial.value)) {
    out = {true, alpha, trial.value, std::move(trial.point), eval.count};
    return out;
  }

  double prev_alpha = alpha;
  double prev_value = trial.value;
  alpha = quadratic_step(phi0, dphi0, alpha, trial.value);
  for (int k = 0; k < options.max_backtracks; ++k) {
    trial = eval(alpha);
    if (armijo(alpha, trial.value)) {
      out = {true, alpha, trial.value, std::move(trial.point), eval.count};
      return out;
    }
    const double next = cubic_step(phi0, dphi0, alpha, trial.value, prev_alpha, prev_value);
    prev_alpha = alpha;
    prev_value = trial.value;
    alpha = next;
  }
  out.evaluations = eval.count;
  return out;
}

}  // namespace sphap
