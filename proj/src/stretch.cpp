#include "sphap/stretch.hpp"

#include "sphap/kernels.hpp"

#include <array>
#include <vector>

namespace sphap {

SparseMatrix assemble_laplacian(const SimplicialSurface& surface, const MatrixX3& f,
                                Execution exec) {
  const auto terms = kernels::face_terms(surface, f, false, exec);
  return kernels::laplacian_from_weights(surface, terms.weights);
}

EnergyReport stretch_energy(const SimplicialSurface& surface, const MatrixX3& f, Execution exec) {
  const auto terms = kernels::face_terms(surface, f, false, exec);
  EnergyReport r;
  r.stretch = kernels::ordered_sum(terms.stretch);
  r.image_area = kernels::ordered_sum(terms.image_area);
  r.normalized = surface.total_area() * r.stretch / r.image_area;
  r.authalic = r.normalized - r.image_area;
  return r;
}

double stretch_energy_quadratic(const SimplicialSurface& surface, const MatrixX3& f,
                                Execution exec) {
  const SparseMatrix L = assemble_laplacian(surface, f, exec);
  double e = 0.0;
  for (int s = 0; s < 3; ++s) e += f.col(s).dot(L * f.col(s));
  return 0.5 * e;
}

double image_area(const SimplicialSurface& surface, const MatrixX3& f, Execution exec) {
  return kernels::ordered_sum(kernels::face_terms(surface, f, false, exec).image_area);
}

MatrixX3 image_area_gradient(const SimplicialSurface& surface, const MatrixX3& f,
                             Execution exec) {
  const auto terms = kernels::face_terms(surface, f, true, exec);
  return kernels::scatter_partials(surface, terms.area_partials);
}

MatrixX3 image_area_gradient_laplacian(const SimplicialSurface& surface, const MatrixX3& f,
                                       Execution exec) {
  const auto terms = kernels::face_terms(surface, f, false, exec);
  const auto& F = surface.faces();
  const auto& ref = surface.face_areas();
  MatrixX3 grad = MatrixX3::Zero(f.rows(), 3);
  for (Index t = 0; t < F.rows(); ++t) {
    // local 3x3 Laplacian of this face alone
    Eigen::Matrix3d Lt = Eigen::Matrix3d::Zero();
    for (int c = 0; c < 3; ++c) {
      const int a = (c + 1) % 3;
      const int b = (c + 2) % 3;
      const double w = terms.weights(t, c);
      Lt(a, b) -= w;
      Lt(b, a) -= w;
      Lt(a, a) += w;
      Lt(b, b) += w;
    }
    Eigen::Matrix3d ft;
    for (int c = 0; c < 3; ++c) ft.row(c) = f.row(F(t, c));
    const Eigen::Matrix3d g = (ref[t] / terms.image_area[t]) * (Lt * ft);
    for (int c = 0; c < 3; ++c) grad.row(F(t, c)) += g.row(c);
  }
  return grad;
}

MatrixX3 stretch_gradient(const SimplicialSurface& surface, const MatrixX3& f, Execution exec) {
  const SparseMatrix L = assemble_laplacian(surface, f, exec);
  return 2.0 * (L * f);
}

EnergyAndGradient normalized_energy_gradient(const SimplicialSurface& surface, const MatrixX3& f,
                                             Execution exec) {
  const auto terms = kernels::face_terms(surface, f, true, exec);
  EnergyAndGradient out;
  auto& r = out.energy;
  r.stretch = kernels::ordered_sum(terms.stretch);
  r.image_area = kernels::ordered_sum(terms.image_area);
  const double M = surface.total_area();
  r.normalized = M * r.stretch / r.image_area;
  r.authalic = r.normalized - r.image_area;

  const SparseMatrix L = kernels::laplacian_from_weights(surface, terms.weights);
  const MatrixX3 grad_area = kernels::scatter_partials(surface, terms.area_partials);
  out.gradient = (2.0 * M / r.image_area) * (L * f) -
                 (M * r.stretch / (r.image_area * r.image_area)) * grad_area;
  return out;
}

FaceHessian face_hessian(const Vector3& fi, const Vector3& fj, const Vector3& fk,
                         double reference_area) {
  if (!(reference_area > 0.0)) throw ContractError("face_hessian: zero reference area");
  // h[s] holds, for coordinate s, the differences (f_j - f_k, f_k - f_i, f_i - f_j)
  std::array<Vector3, 3> h;
  for (int s = 0; s < 3; ++s) h[s] << fj[s] - fk[s], fk[s] - fi[s], fi[s] - fj[s];

  FaceHessian H;
  for (int s = 0; s < 3; ++s) {
    for (int t = 0; t < 3; ++t) {
      Eigen::Matrix3d block;
      if (s == t) {
        block.setZero();
        for (int u = 0; u < 3; ++u)
          if (u != s) block += h[u] * h[u].transpose();
      } else {
        block = h[s] * h[t].transpose() - 2.0 * h[t] * h[s].transpose();
      }
      H.block<3, 3>(3 * s, 3 * t) = block;
    }
  }
  return H / (2.0 * reference_area);
}

SparseMatrix assemble_stretch_hessian(const SimplicialSurface& surface, const MatrixX3& f) {
  const auto& F = surface.faces();
  const auto& ref = surface.face_areas();
  const Index n = surface.num_vertices();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(81 * F.rows());
  for (Index t = 0; t < F.rows(); ++t) {
    const FaceHessian H = face_hessian(f.row(F(t, 0)), f.row(F(t, 1)), f.row(F(t, 2)), ref[t]);
    for (int a = 0; a < 9; ++a)
      for (int b = 0; b < 9; ++b)
        triplets.emplace_back((a / 3) * n + F(t, a % 3), (b / 3) * n + F(t, b % 3), H(a, b));
  }
  SparseMatrix out(3 * n, 3 * n);
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

}  // namespace sphap
