#include "sphap/kernels.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <tuple>
#include <vector>

namespace sphap::kernels {

namespace {

double corner_cotangent(const Vector3& apex, const Vector3& a, const Vector3& b) {
  const Vector3 u = a - apex;
  const Vector3 v = b - apex;
  return u.dot(v) / u.cross(v).norm();
}

template <class Body>
void for_each_face(Index m, Execution exec, Body&& body) {
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(static)
    for (Index t = 0; t < m; ++t) body(t);
  } else {
    for (Index t = 0; t < m; ++t) body(t);
  }
}

FaceTerms face_terms_impl(const SimplicialSurface& surface, const MatrixX3& f, bool with_partials,
                          Execution exec) {
  const auto& F = surface.faces();
  const auto& ref = surface.face_areas();
  const Index m = F.rows();
  if (f.rows() != surface.num_vertices())
    throw ContractError("mapping has " + std::to_string(f.rows()) + " rows, mesh has " +
                        std::to_string(surface.num_vertices()) + " vertices");

  FaceTerms out;
  out.image_area.resize(m);
  out.stretch.resize(m);
  out.weights.resize(m, 3);
  if (with_partials) out.area_partials.resize(m, 9);
  std::vector<char> bad(m, 0);

  for_each_face(m, exec, [&](Index t) {
    const Vector3 fi = f.row(F(t, 0));
    const Vector3 fj = f.row(F(t, 1));
    const Vector3 fk = f.row(F(t, 2));
    const FaceGeometry g = evaluate_face(fi, fj, fk, ref[t], with_partials);
    bad[t] = g.degenerate ? 1 : 0;
    out.image_area[t] = g.image_area;
    out.stretch[t] = g.image_area * g.image_area / ref[t];
    out.weights.row(t) = g.weights.transpose();
    if (with_partials) out.area_partials.row(t) = g.area_partials.transpose();
  });

  for (Index t = 0; t < m; ++t) {
    if (!bad[t]) continue;
    if (!(ref[t] > 0.0)) throw DegenerateFaceError(t, "zero reference area");
    throw DegenerateFaceError(t, "degenerate image face: singular cotangent weight");
  }
  return out;
}

Eigen::VectorXd orientations_impl(const SimplicialSurface& surface, const MatrixX3& f,
                                  Execution exec) {
  const auto& F = surface.faces();
  Eigen::VectorXd det(F.rows());
  for_each_face(F.rows(), exec, [&](Index t) {
    const Vector3 fi = f.row(F(t, 0));
    const Vector3 fj = f.row(F(t, 1));
    const Vector3 fk = f.row(F(t, 2));
    det[t] = fi.dot(fj.cross(fk));
  });
  return det;
}

Eigen::VectorXd ratios_impl(const SimplicialSurface& surface, const MatrixX3& f, Execution exec) {
  const auto& F = surface.faces();
  const auto& ref = surface.face_areas();
  Eigen::VectorXd r(F.rows());
  for_each_face(F.rows(), exec, [&](Index t) {
    const Vector3 fi = f.row(F(t, 0));
    const Vector3 fj = f.row(F(t, 1));
    const Vector3 fk = f.row(F(t, 2));
    r[t] = 0.5 * (fj - fi).cross(fk - fi).norm() / ref[t];
  });
  return r;
}

}  // namespace

FaceGeometry evaluate_face(const Vector3& fi, const Vector3& fj, const Vector3& fk,
                           double reference_area, bool with_partials) {
  FaceGeometry g;
  const Vector3 f_ij = fi - fj;
  const Vector3 f_ik = fi - fk;
  const Vector3 f_jk = fj - fk;

  g.a12 = f_ij[0] * f_ik[1] - f_ij[1] * f_ik[0];
  g.a13 = f_ij[0] * f_ik[2] - f_ij[2] * f_ik[0];
  g.a23 = f_ij[1] * f_ik[2] - f_ij[2] * f_ik[1];
  g.image_area = 0.5 * std::sqrt(g.a12 * g.a12 + g.a13 * g.a13 + g.a23 * g.a23);

  if (!(reference_area > 0.0) || !(g.image_area > kDegenerateArea)) {
    g.degenerate = true;
    return g;
  }

  g.cotangents << corner_cotangent(fi, fj, fk), corner_cotangent(fj, fk, fi),
      corner_cotangent(fk, fi, fj);
  g.weights = g.cotangents * (g.image_area / (2.0 * reference_area));

  if (with_partials) {
    const double s = 1.0 / (4.0 * g.image_area);
    auto& d = g.area_partials;
    // corner i
    d[0] = s * (g.a12 * f_jk[1] + g.a13 * f_jk[2]);
    d[3] = -s * (g.a12 * f_jk[0] - g.a23 * f_jk[2]);
    d[6] = -s * (g.a13 * f_jk[0] + g.a23 * f_jk[1]);
    // corner j
    d[1] = -s * (g.a12 * f_ik[1] + g.a13 * f_ik[2]);
    d[4] = s * (g.a12 * f_ik[0] - g.a23 * f_ik[2]);
    d[7] = s * (g.a13 * f_ik[0] + g.a23 * f_ik[1]);
    // corner k
    d[2] = s * (g.a12 * f_ij[1] + g.a13 * f_ij[2]);
    d[5] = -s * (g.a12 * f_ij[0] - g.a23 * f_ij[2]);
    d[8] = -s * (g.a13 * f_ij[0] + g.a23 * f_ij[1]);
  }
  return g;
}

FaceTerms face_terms_serial(const SimplicialSurface& surface, const MatrixX3& f,
                            bool with_partials) {
  return face_terms_impl(surface, f, with_partials, Execution::serial);
}

FaceTerms face_terms_parallel(const SimplicialSurface& surface, const MatrixX3& f,
                              bool with_partials) {
  return face_terms_impl(surface, f, with_partials, Execution::parallel);
}

FaceTerms face_terms(const SimplicialSurface& surface, const MatrixX3& f, bool with_partials,
                     Execution exec) {
  return face_terms_impl(surface, f, with_partials, exec);
}

Eigen::VectorXd face_orientations_serial(const SimplicialSurface& surface, const MatrixX3& f) {
  return orientations_impl(surface, f, Execution::serial);
}

Eigen::VectorXd face_orientations_parallel(const SimplicialSurface& surface, const MatrixX3& f) {
  return orientations_impl(surface, f, Execution::parallel);
}

Eigen::VectorXd area_ratios_serial(const SimplicialSurface& surface, const MatrixX3& f) {
  return ratios_impl(surface, f, Execution::serial);
}

Eigen::VectorXd area_ratios_parallel(const SimplicialSurface& surface, const MatrixX3& f) {
  return ratios_impl(surface, f, Execution::parallel);
}

Eigen::VectorXd area_ratios(const SimplicialSurface& surface, const MatrixX3& f, Execution exec) {
  return ratios_impl(surface, f, exec);
}

SparseMatrix laplacian_from_weights(const SimplicialSurface& surface, const FaceWeights& weights) {
  const auto& F = surface.faces();
  const Index n = surface.num_vertices();

  struct Contribution {
    int row;
    int col;
    double w;
  };
  std::vector<Contribution> contrib;
  contrib.reserve(6 * F.rows());
  for (Index t = 0; t < F.rows(); ++t) {
    for (int c = 0; c < 3; ++c) {
      const int a = F(t, (c + 1) % 3);
      const int b = F(t, (c + 2) % 3);
      contrib.push_back({a, b, weights(t, c)});
      contrib.push_back({b, a, weights(t, c)});
    }
  }
  std::sort(contrib.begin(), contrib.end(), [](const Contribution& x, const Contribution& y) {
    return std::tie(x.row, x.col, x.w) < std::tie(y.row, y.col, y.w);
  });

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(contrib.size() / 2 + 2 * n);
  std::vector<double> diag(n, 0.0);
  for (std::size_t i = 0; i < contrib.size();) {
    std::size_t j = i;
    double sum = 0.0;
    while (j < contrib.size() && contrib[j].row == contrib[i].row &&
           contrib[j].col == contrib[i].col) {
      sum += contrib[j].w;
      ++j;
    }
    triplets.emplace_back(contrib[i].row, contrib[i].col, -sum);
    diag[contrib[i].row] += sum;  // columns visited in increasing order
    i = j;
  }
  for (Index v = 0; v < n; ++v) triplets.emplace_back(v, v, diag[v]);

  SparseMatrix L(n, n);
  L.setFromTriplets(triplets.begin(), triplets.end());
  return L;
}

MatrixX3 scatter_partials(const SimplicialSurface& surface, const FacePartials& partials) {
  const auto& F = surface.faces();
  MatrixX3 out = MatrixX3::Zero(surface.num_vertices(), 3);
  for (Index t = 0; t < F.rows(); ++t)
    for (int s = 0; s < 3; ++s)
      for (int c = 0; c < 3; ++c) out(F(t, c), s) += partials(t, 3 * s + c);
  return out;
}

double ordered_sum(const Eigen::VectorXd& values) {
  double sum = 0.0;
  double comp = 0.0;
  for (Index i = 0; i < values.size(); ++i) {
    const double x = values[i];
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }
  return sum + comp;
}

}  // namespace sphap::kernels
