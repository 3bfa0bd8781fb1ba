#pragma once

// Independent reference computations for the tests. These deliberately take a
// different route from the library: angles through acos, areas through Heron's
// formula, dense matrices, plain finite differences.

#include "sphap/mesh.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

namespace oracle {

using sphap::Index;
using sphap::MatrixX3;
using sphap::Vector3;

inline double heron(const Vector3& a, const Vector3& b, const Vector3& c) {
  const double x = (b - c).norm(), y = (c - a).norm(), z = (a - b).norm();
  // Kahan's stable ordering
  double s[3] = {x, y, z};
  std::sort(s, s + 3, std::greater<>());
  const double p = (s[0] + (s[1] + s[2])) * (s[2] - (s[0] - s[1])) * (s[2] + (s[0] - s[1])) *
                   (s[0] + (s[1] - s[2]));
  return 0.25 * std::sqrt(std::max(p, 0.0));
}

inline double angle_at(const Vector3& apex, const Vector3& a, const Vector3& b) {
  const Vector3 u = (a - apex).normalized(), v = (b - apex).normalized();
  return std::acos(std::clamp(u.dot(v), -1.0, 1.0));
}

inline Vector3 corner(const MatrixX3& f, int v) { return f.row(v).transpose(); }

/// Dense stretch Laplacian from angles and Heron areas.
inline Eigen::MatrixXd dense_stretch_laplacian(const sphap::SimplicialSurface& s,
                                               const MatrixX3& f) {
  const auto& V = s.vertices();
  const auto& F = s.faces();
  const Index n = V.rows();
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  for (Index t = 0; t < F.rows(); ++t) {
    const int idx[3] = {F(t, 0), F(t, 1), F(t, 2)};
    const double ref = heron(corner(V, idx[0]), corner(V, idx[1]), corner(V, idx[2]));
    const double img = heron(corner(f, idx[0]), corner(f, idx[1]), corner(f, idx[2]));
    for (int c = 0; c < 3; ++c) {
      const int k = idx[c], i = idx[(c + 1) % 3], j = idx[(c + 2) % 3];
      const double theta = angle_at(corner(f, k), corner(f, i), corner(f, j));
      const double w = 0.5 / std::tan(theta) * img / ref;
      L(i, j) -= w;
      L(j, i) -= w;
      L(i, i) += w;
      L(j, j) += w;
    }
  }
  return L;
}

inline double stretch_energy(const sphap::SimplicialSurface& s, const MatrixX3& f) {
  const auto& V = s.vertices();
  const auto& F = s.faces();
  double e = 0.0;
  for (Index t = 0; t < F.rows(); ++t) {
    const double ref = heron(corner(V, F(t, 0)), corner(V, F(t, 1)), corner(V, F(t, 2)));
    const double img = heron(corner(f, F(t, 0)), corner(f, F(t, 1)), corner(f, F(t, 2)));
    e += img * img / ref;
  }
  return e;
}

inline double image_area(const sphap::SimplicialSurface& s, const MatrixX3& f) {
  const auto& F = s.faces();
  double a = 0.0;
  for (Index t = 0; t < F.rows(); ++t)
    a += heron(corner(f, F(t, 0)), corner(f, F(t, 1)), corner(f, F(t, 2)));
  return a;
}

inline double normalized_energy(const sphap::SimplicialSurface& s, const MatrixX3& f) {
  return s.total_area() * stretch_energy(s, f) / image_area(s, f);
}

/// Central differences of a scalar function of an n x 3 array.
inline MatrixX3 fd_gradient(const std::function<double(const MatrixX3&)>& fn, const MatrixX3& f,
                            double h) {
  MatrixX3 g(f.rows(), 3);
  MatrixX3 x = f;
  for (Index i = 0; i < f.rows(); ++i) {
    for (int s = 0; s < 3; ++s) {
      const double v = x(i, s);
      x(i, s) = v + h;
      const double ep = fn(x);
      x(i, s) = v - h;
      const double em = fn(x);
      x(i, s) = v;
      g(i, s) = (ep - em) / (2.0 * h);
    }
  }
  return g;
}

/// Jacobian of a vector function of vec(f), by central differences.
inline Eigen::MatrixXd fd_jacobian(const std::function<Eigen::VectorXd(const MatrixX3&)>& fn,
                                   const MatrixX3& f, double h) {
  const Index n = f.rows();
  Eigen::MatrixXd J(3 * n, 3 * n);
  MatrixX3 x = f;
  for (int s = 0; s < 3; ++s) {
    for (Index i = 0; i < n; ++i) {
      const double v = x(i, s);
      x(i, s) = v + h;
      const Eigen::VectorXd gp = fn(x);
      x(i, s) = v - h;
      const Eigen::VectorXd gm = fn(x);
      x(i, s) = v;
      J.col(s * n + i) = (gp - gm) / (2.0 * h);
    }
  }
  return J;
}

inline MatrixX3 random_sphere_points(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  MatrixX3 out(n, 3);
  for (Index i = 0; i < n; ++i) {
    Vector3 p(g(rng), g(rng), g(rng));
    out.row(i) = p.normalized().transpose();
  }
  return out;
}

/// Gaussian jitter of unit-sphere rows, renormalized.
inline MatrixX3 jitter_on_sphere(const MatrixX3& f, double amount, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  MatrixX3 out = f;
  for (Index i = 0; i < f.rows(); ++i) {
    Vector3 p = f.row(i).transpose() + amount * Vector3(g(rng), g(rng), g(rng));
    out.row(i) = p.normalized().transpose();
  }
  return out;
}

inline double max_relative_error(const MatrixX3& a, const MatrixX3& b, double floor = 1e-8) {
  double worst = 0.0;
  for (Index i = 0; i < a.rows(); ++i)
    for (int s = 0; s < 3; ++s) {
      const double scale = std::max(std::abs(b(i, s)), floor);
      worst = std::max(worst, std::abs(a(i, s) - b(i, s)) / scale);
    }
  return worst;
}

}  // namespace oracle
