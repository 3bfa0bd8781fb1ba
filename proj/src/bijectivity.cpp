#include "sphap/bijectivity.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace sphap {

namespace {

// tan(phi / 2) for the angle phi between a and b; NaN when phi is within
// 1e-10 of pi
double half_angle_tangent(std::complex<double> a, std::complex<double> b) {
  const double cross = std::abs(a.real() * b.imag() - a.imag() * b.real());
  const double dot = a.real() * b.real() + a.imag() * b.imag();
  const double lens = std::abs(a) * std::abs(b);
  // 1 + cos(phi) ~ (pi - phi)^2 / 2
  if (lens + dot <= 5e-21 * lens) return std::numeric_limits<double>::quiet_NaN();
  return cross / (lens + dot);
}

}  // namespace

SparseMatrix assemble_mean_value_laplacian(const SimplicialSurface& surface,
                                           const PlanarMapping& h, Execution exec) {
  const auto& F = surface.faces();
  const Index m = F.rows();
  const Index n = surface.num_vertices();
  if (h.size() != n) throw ContractError("planar mapping has the wrong size");

  // per face and corner c: weights towards corner c+1 and c+2
  Eigen::Matrix<double, Eigen::Dynamic, 6> w(m, 6);
  std::vector<char> bad(m, 0);
  auto body = [&](Index t) {
    for (int c = 0; c < 3; ++c) {
      const int i = F(t, c), j = F(t, (c + 1) % 3), k = F(t, (c + 2) % 3);
      if (h.at_infinity(i) || h.at_infinity(j) || h.at_infinity(k)) {
        w.row(t).setZero();
        return;
      }
      const auto a = h.values[j] - h.values[i];
      const auto b = h.values[k] - h.values[i];
      const double la = std::abs(a), lb = std::abs(b);
      if (la == 0.0 || lb == 0.0) {
        bad[t] = 1;
        return;
      }
      const double tn = half_angle_tangent(a, b);
      if (std::isnan(tn)) {
        bad[t] = 2;
        return;
      }
      w(t, 2 * c) = tn / la;
      w(t, 2 * c + 1) = tn / lb;
    }
  };
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(static)
    for (Index t = 0; t < m; ++t) body(t);
  } else {
    for (Index t = 0; t < m; ++t) body(t);
  }
  for (Index t = 0; t < m; ++t)
    if (bad[t]) {
      throw DegenerateFaceError(t, bad[t] == 1 ? "coincident planar vertices"
                                               : "planar angle of pi in mean value weight");
    }

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(9 * m);
  for (Index t = 0; t < m; ++t) {
    for (int c = 0; c < 3; ++c) {
      const int i = F(t, c), j = F(t, (c + 1) % 3), k = F(t, (c + 2) % 3);
      trip.emplace_back(i, j, -w(t, 2 * c));
      trip.emplace_back(i, k, -w(t, 2 * c + 1));
      trip.emplace_back(i, i, w(t, 2 * c) + w(t, 2 * c + 1));
    }
  }
  SparseMatrix L(n, n);
  L.setFromTriplets(trip.begin(), trip.end());
  return L;
}

PlanarMapping unfold_pass(const SimplicialSurface& surface, const PlanarMapping& h, double radius,
                          Execution exec, const PassObserver& observer) {
  const RadiusSplit split = split_by_radius(h, radius);
  if (h.infinity) {
    std::vector<char> inner(h.size(), 0);
    for (Index v : split.interior) inner[v] = 1;
    for (int t : surface.incident_faces(*h.infinity))
      for (int c = 0; c < 3; ++c)
        if (inner[surface.faces()(t, c)])
          throw NumericalError("interior vertex " + std::to_string(surface.faces()(t, c)) +
                               " is adjacent to the vertex at infinity");
  }
  const SparseMatrix L = assemble_mean_value_laplacian(surface, h, exec);
  PlanarMapping out = solve_dirichlet(L, h, split);
  if (observer) observer(h, out, split);
  return out;
}

BijectivityResult correct_bijectivity(const SimplicialSurface& surface, const SphericalMapping& f,
                                      const BijectivityOptions& options) {
  BijectivityResult r{f, 0, 0, 0};
  r.folds_before = count_folds(surface, f, options.exec);
  Index folds = r.folds_before;
  do {
    PlanarMapping h = stereographic(r.f);
    h = unfold_pass(surface, h, options.radius, options.exec, options.observer);
    h = invert_plane(h);
    h = unfold_pass(surface, h, options.radius, options.exec, options.observer);
    r.f = inverse_stereographic(invert_plane(h));
    ++r.sweeps;
    folds = count_folds(surface, r.f, options.exec);
  } while (folds > 0 && r.sweeps < options.max_sweeps);
  r.folds_after = folds;
  return r;
}

}  // namespace sphap
