#pragma once

#include "sphap/mesh.hpp"
#include "sphap/types.hpp"

namespace sphap {

/// Energies of a mapping f of the reference mesh M.
struct EnergyReport {
  double stretch = 0.0;     // E_S(f) = sum_tau |f(tau)|^2 / |tau|
  double image_area = 0.0;  // A(f) = sum_tau |f(tau)|
  double normalized = 0.0;  // E(f) = |M| E_S(f) / A(f)
  /// E(f) - A(f): stretch energy measured against reference areas rescaled to
  /// the image area. Nonnegative, zero iff all area ratios are equal.
  double authalic = 0.0;
};

/// Stretch Laplacian L_S(f): cotangent weights of the image triangles scaled
/// by |f(tau)| / |tau|. Symmetric, zero row sums.
SparseMatrix assemble_laplacian(const SimplicialSurface& surface, const MatrixX3& f,
                                Execution exec = Execution::parallel);

EnergyReport stretch_energy(const SimplicialSurface& surface, const MatrixX3& f,
                            Execution exec = Execution::parallel);

/// E_S via the quadratic form 1/2 sum_s f^s^T L_S(f) f^s.
double stretch_energy_quadratic(const SimplicialSurface& surface, const MatrixX3& f,
                                Execution exec = Execution::parallel);

double image_area(const SimplicialSurface& surface, const MatrixX3& f,
                  Execution exec = Execution::parallel);

/// grad A(f) from the closed-form partials of the projected signed areas.
MatrixX3 image_area_gradient(const SimplicialSurface& surface, const MatrixX3& f,
                             Execution exec = Execution::parallel);

/// grad A(f) as the sum over faces of (|tau| / |f(tau)|) L_S(f|tau) f_tau.
MatrixX3 image_area_gradient_laplacian(const SimplicialSurface& surface, const MatrixX3& f,
                                       Execution exec = Execution::parallel);

/// grad E_S(f) = 2 L_S(f) f.
MatrixX3 stretch_gradient(const SimplicialSurface& surface, const MatrixX3& f,
                          Execution exec = Execution::parallel);

struct EnergyAndGradient {
  EnergyReport energy;
  MatrixX3 gradient;  // Euclidean gradient of E
};

/// grad E = (2 |M| / A) L_S f - (|M| E_S / A^2) grad A.
EnergyAndGradient normalized_energy_gradient(const SimplicialSurface& surface, const MatrixX3& f,
                                             Execution exec = Execution::parallel);

using FaceHessian = Eigen::Matrix<double, 9, 9>;

/// Hessian of |f(tau)|^2 / |tau| in the corner values. Local index 3 * s + c
/// for coordinate s of corner c.
FaceHessian face_hessian(const Vector3& fi, const Vector3& fj, const Vector3& fk,
                         double reference_area);

/// Hessian of E_S on vec(f) (index s * n + v), 3n x 3n, symmetric.
SparseMatrix assemble_stretch_hessian(const SimplicialSurface& surface, const MatrixX3& f);

}  // namespace sphap
