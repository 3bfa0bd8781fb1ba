#include "sphap/sphere.hpp"

#include "sphap/kernels.hpp"

#include <cmath>

namespace sphap {

SphericalMapping SphericalMapping::from_rows(MatrixX3 rows, double tolerance) {
  for (Index i = 0; i < rows.rows(); ++i) {
    const double len = rows.row(i).norm();
    if (!(std::abs(len - 1.0) <= tolerance)) {
      throw ContractError("row " + std::to_string(i) + " is not on the unit sphere (norm " +
                          std::to_string(len) + ")");
    }
  }
  return SphericalMapping(std::move(rows));
}

TangentField project_tangent(const SphericalMapping& f, const MatrixX3& g) {
  if (g.rows() != f.size()) throw ContractError("project_tangent: row count mismatch");
  const MatrixX3& F = f.rows();
  const Eigen::VectorXd dots = (F.array() * g.array()).rowwise().sum();
  return {g - F.cwiseProduct(dots.replicate(1, 3))};
}

SphericalMapping retract(const SphericalMapping& f, const TangentField& xi, double alpha) {
  if (xi.vectors.rows() != f.size()) throw ContractError("retract: row count mismatch");
  MatrixX3 g = f.rows() + alpha * xi.vectors;
  for (Index i = 0; i < g.rows(); ++i) {
    const double len = g.row(i).norm();
    if (!(len >= 1e-14))
      throw NumericalError("retraction: row " + std::to_string(i) + " collapsed to the origin");
    g.row(i) /= len;
  }
  return SphericalMapping(std::move(g));
}

SphericalMapping project_to_manifold(const MatrixX3& g) {
  MatrixX3 out = g;
  for (Index i = 0; i < out.rows(); ++i) {
    const double len = out.row(i).norm();
    if (!(len > 0.0) || !std::isfinite(len))
      throw NumericalError("cannot normalize row " + std::to_string(i));
    out.row(i) /= len;
  }
  return SphericalMapping(std::move(out));
}

PlanarMapping stereographic(const SphericalMapping& f) {
  PlanarMapping h;
  h.values.resize(f.size());
  for (Index i = 0; i < f.size(); ++i) {
    const Vector3 p = f.row(i);
    const double denom = 1.0 - p.z();
    if (denom == 0.0) {
      if (h.infinity)
        throw NumericalError("two vertices at the north pole: " + std::to_string(*h.infinity) +
                             " and " + std::to_string(i));
      h.infinity = i;
      h.values[i] = {0.0, 0.0};
      continue;
    }
    h.values[i] = {p.x() / denom, p.y() / denom};
  }
  return h;
}

SphericalMapping inverse_stereographic(const PlanarMapping& h) {
  MatrixX3 out(h.size(), 3);
  for (Index i = 0; i < h.size(); ++i) {
    if (h.at_infinity(i)) {
      out.row(i) << 0.0, 0.0, 1.0;
      continue;
    }
    const double u = h.values[i].real();
    const double v = h.values[i].imag();
    const double r2 = u * u + v * v;
    out.row(i) << 2.0 * u, 2.0 * v, r2 - 1.0;
    out.row(i) /= r2 + 1.0;
    // renormalize away roundoff so the row passes the unit-norm contract
    out.row(i).normalize();
  }
  return SphericalMapping(std::move(out));
}

PlanarMapping invert_plane(const PlanarMapping& h) {
  PlanarMapping out;
  out.values.resize(h.size());
  for (Index i = 0; i < h.size(); ++i) {
    if (h.at_infinity(i)) {
      out.values[i] = {0.0, 0.0};
      continue;
    }
    const auto z = h.values[i];
    if (z == std::complex<double>(0.0, 0.0)) {
      if (out.infinity) throw NumericalError("two vertices map to infinity under inversion");
      out.infinity = i;
      out.values[i] = {0.0, 0.0};
      continue;
    }
    out.values[i] = 1.0 / std::conj(z);
  }
  return out;
}

FoldReport fold_report(const SimplicialSurface& surface, const MatrixX3& f, Execution exec) {
  const Eigen::VectorXd det = exec == Execution::parallel
                                  ? kernels::face_orientations_parallel(surface, f)
                                  : kernels::face_orientations_serial(surface, f);
  FoldReport r;
  for (Index t = 0; t < det.size(); ++t) {
    if (det[t] < 0.0) ++r.folds;
    else if (det[t] == 0.0) ++r.degenerate;
  }
  return r;
}

Index count_folds(const SimplicialSurface& surface, const SphericalMapping& f, Execution exec) {
  return fold_report(surface, f.rows(), exec).folds;
}

}  // namespace sphap
