#include "sphap/fpi.hpp"

#include "sphap/diagnostics.hpp"
#include "sphap/linear_solve.hpp"
#include "sphap/stretch.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace sphap {

RadiusSplit split_by_radius(const PlanarMapping& h, double radius) {
  RadiusSplit s;
  for (Index i = 0; i < h.size(); ++i) {
    if (!h.at_infinity(i) && std::abs(h.values[i]) < radius)
      s.interior.push_back(i);
    else
      s.boundary.push_back(i);
  }
  return s;
}

double median_magnitude(const PlanarMapping& h) {
  std::vector<double> m;
  m.reserve(h.size());
  for (Index i = 0; i < h.size(); ++i)
    if (!h.at_infinity(i)) m.push_back(std::abs(h.values[i]));
  if (m.empty()) throw NumericalError("median of an empty set");
  const std::size_t mid = m.size() / 2;
  std::nth_element(m.begin(), m.begin() + mid, m.end());
  if (m.size() % 2 == 1) return m[mid];
  const double upper = m[mid];
  const double lower = *std::max_element(m.begin(), m.begin() + mid);
  return 0.5 * (lower + upper);
}

PlanarMapping solve_dirichlet(const SparseMatrix& L, const PlanarMapping& h,
                              const RadiusSplit& split) {
  const Index n = h.size();
  if (L.rows() != n || L.cols() != n) throw ContractError("solve_dirichlet: size mismatch");
  PlanarMapping out = h;
  if (split.interior.empty()) return out;

  std::vector<Index> slot(n, -1);
  for (std::size_t k = 0; k < split.interior.size(); ++k) slot[split.interior[k]] = k;
  const Index ni = static_cast<Index>(split.interior.size());

  std::vector<Eigen::Triplet<double>> trip;
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(ni, 2);
  for (Index col = 0; col < L.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(L, col); it; ++it) {
      const Index r = slot[it.row()];
      if (r < 0) continue;
      const Index c = slot[it.col()];
      if (c >= 0) {
        trip.emplace_back(r, c, it.value());
      } else if (it.value() != 0.0) {
        if (h.at_infinity(it.col()))
          throw NumericalError("interior vertex " + std::to_string(it.row()) +
                               " is adjacent to the vertex at infinity");
        rhs(r, 0) -= it.value() * h.values[it.col()].real();
        rhs(r, 1) -= it.value() * h.values[it.col()].imag();
      }
    }
  }
  SparseMatrix A(ni, ni);
  A.setFromTriplets(trip.begin(), trip.end());
  const Eigen::MatrixXd x = solve_sparse(A, rhs);
  for (Index k = 0; k < ni; ++k) out.values[split.interior[k]] = {x(k, 0), x(k, 1)};
  return out;
}

PlanarMapping fpi_step(const SparseMatrix& L, const PlanarMapping& h, double radius,
                       const std::function<void(const PlanarMapping&, const PlanarMapping&,
                                                const RadiusSplit&)>& on_solve) {
  const PlanarMapping inverted = invert_plane(h);
  const RadiusSplit split = split_by_radius(inverted, radius);
  PlanarMapping g = solve_dirichlet(L, inverted, split);
  if (on_solve) on_solve(inverted, g, split);
  const double med = median_magnitude(g);
  if (!(med > 0.0) || !std::isfinite(med))
    throw NumericalError("median magnitude is not positive");
  for (auto& z : g.values) z /= med;
  return g;
}

namespace {

MatrixX3 mirror_z(MatrixX3 f) {
  f.col(2) *= -1.0;
  return f;
}

}  // namespace

FpiResult fixed_point_iteration(const SimplicialSurface& surface, const SphericalMapping& f0,
                                const FpiOptions& options) {
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  const Execution exec = options.exec;

  MatrixX3 g = f0.rows();
  auto energy = stretch_energy(surface, g, exec);
  PlanarMapping h = stereographic(f0);
  // inversion pulled back to the sphere is the mirror z -> -z, so the planar
  // values live in the mirrored frame on odd iterations
  bool mirrored = false;

  FpiResult out{f0, {}, std::nullopt, 0, "max_iters"};
  for (int k = 1; k <= options.max_iters; ++k) {
    const SparseMatrix L = assemble_laplacian(surface, g, exec);
    h = fpi_step(L, h, options.radius, options.on_solve);
    mirrored = !mirrored;
    MatrixX3 f = inverse_stereographic(h).rows();
    if (mirrored) f = mirror_z(std::move(f));

    const auto next = stretch_energy(surface, f, exec);
    FpiRecord rec;
    rec.iter = k;
    rec.stretch = next.stretch;
    rec.authalic = next.authalic;
    rec.normalized = next.normalized;
    rec.sd_over_mean = area_ratio_stats(surface, f, exec).sd_over_mean;
    rec.folds = fold_report(surface, f, exec).folds;
    rec.elapsed_s = std::chrono::duration<double>(clock::now() - start).count();
    out.records.push_back(rec);

    if (next.authalic > energy.authalic && !out.first_increase_iter)
      out.first_increase_iter = k;
    if (options.stop_on_increase && next.authalic > energy.authalic) {
      out.stop_reason = "energy_increase";
      break;
    }
    const double delta = energy.stretch - next.stretch;
    g = std::move(f);
    energy = next;
    out.accepted_iters = k;
    if (options.epsilon && delta <= *options.epsilon) {
      out.stop_reason = "converged";
      break;
    }
  }
  out.f = SphericalMapping::from_rows(std::move(g), 1e-10);
  return out;
}

SphericalMapping conformal_initial_map(const SimplicialSurface& surface,
                                       const ConformalOptions& options) {
  const auto& F = surface.faces();
  Index p = 0;
  if (options.puncture_face) {
    p = *options.puncture_face;
    if (p < 0 || p >= surface.num_faces()) throw ContractError("puncture face out of range");
  } else {
    surface.face_areas().maxCoeff(&p);
  }

  const SparseMatrix L = assemble_laplacian(surface, surface.vertices());
  PlanarMapping h;
  h.values.assign(surface.num_vertices(), {0.0, 0.0});
  RadiusSplit split;
  std::vector<char> pinned(surface.num_vertices(), 0);
  for (int c = 0; c < 3; ++c) {
    pinned[F(p, c)] = 1;
    h.values[F(p, c)] = std::polar(1.0, 2.0 * M_PI * c / 3.0);
  }
  for (Index i = 0; i < surface.num_vertices(); ++i)
    (pinned[i] ? split.boundary : split.interior).push_back(i);
  h = solve_dirichlet(L, h, split);

  std::complex<double> mean(0.0, 0.0);
  for (const auto& z : h.values) mean += z;
  mean /= static_cast<double>(h.size());
  for (auto& z : h.values) z -= mean;
  const double med = median_magnitude(h);
  for (auto& z : h.values) z /= med;

  auto f = inverse_stereographic(h);
  if (count_folds(surface, f) > surface.num_faces() / 2) {
    for (auto& z : h.values) z = std::conj(z);
    f = inverse_stereographic(h);
  }
  return f;
}

}  // namespace sphap
