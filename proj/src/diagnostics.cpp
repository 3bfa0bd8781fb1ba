#include "sphap/diagnostics.hpp"

#include "sphap/kernels.hpp"
#include "sphap/linear_solve.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

namespace sphap {

AreaRatioStats ratio_stats(Eigen::VectorXd ratios) {
  if (ratios.size() == 0) throw ContractError("no area ratios");
  AreaRatioStats s;
  const double count = static_cast<double>(ratios.size());
  s.mean = kernels::ordered_sum(ratios) / count;
  s.sd = std::sqrt(kernels::ordered_sum((ratios.array() - s.mean).square().matrix()) / count);
  s.sd_over_mean = s.sd / s.mean;
  s.min = ratios.minCoeff();
  s.max = ratios.maxCoeff();
  s.ratios = std::move(ratios);
  return s;
}

AreaRatioStats area_ratio_stats(const SimplicialSurface& surface, const MatrixX3& f,
                                Execution exec) {
  return ratio_stats(kernels::area_ratios(surface, f, exec));
}

double authalic_error(const SimplicialSurface& noisy, const SimplicialSurface& clean,
                      double authalic_noisy, double authalic_clean) {
  if (noisy.num_vertices() != clean.num_vertices() || noisy.faces() != clean.faces())
    throw ContractError("authalic_error: meshes differ in topology");
  const double moved = (noisy.vertices() - clean.vertices()).rowwise().norm().sum();
  if (!(moved > 0.0)) throw NumericalError("authalic_error: zero total displacement");
  return static_cast<double>(noisy.num_vertices()) * std::abs(authalic_noisy - authalic_clean) /
         moved;
}

}  // namespace sphap

namespace sphap {

namespace {

struct LocalSums {
  double stretch = 0.0;
  double area = 0.0;
};

LocalSums local_sums(const SimplicialSurface& surface, const MatrixX3& f,
                     const std::vector<int>& faces) {
  const auto& F = surface.faces();
  const auto& ref = surface.face_areas();
  LocalSums s;
  for (int t : faces) {
    const auto g = kernels::evaluate_face(f.row(F(t, 0)), f.row(F(t, 1)), f.row(F(t, 2)), ref[t],
                                          false);
    s.stretch += g.image_area * g.image_area / ref[t];
    s.area += g.image_area;
  }
  return s;
}

}  // namespace

GradientCheck check_energy_gradient(const SimplicialSurface& surface, const MatrixX3& f,
                                    double step, double floor) {
  if (!(step >= 1e-8 && step <= 1e-4))
    throw ContractError("finite-difference step outside [1e-8, 1e-4]");
  const auto eg = normalized_energy_gradient(surface, f, Execution::serial);
  const double ES = eg.energy.stretch;
  const double A = eg.energy.image_area;
  const double M = surface.total_area();

  GradientCheck c;
  c.grad_inf_norm = eg.gradient.cwiseAbs().maxCoeff();
  MatrixX3 x = f;
  for (Index v = 0; v < f.rows(); ++v) {
    const auto faces = surface.incident_faces(v);
    const LocalSums base = local_sums(surface, x, faces);
    for (int s = 0; s < 3; ++s) {
      const double keep = x(v, s);
      x(v, s) = keep + step;
      const LocalSums plus = local_sums(surface, x, faces);
      x(v, s) = keep - step;
      const LocalSums minus = local_sums(surface, x, faces);
      x(v, s) = keep;
      const double dSp = plus.stretch - base.stretch, dSm = minus.stretch - base.stretch;
      const double dAp = plus.area - base.area, dAm = minus.area - base.area;
      // E(+) - E(-) with the common terms cancelled analytically
      const double num = ES * (dAm - dAp) + A * (plus.stretch - minus.stretch) + dSp * dAm -
                         dSm * dAp;
      const double fd = M * num / ((A + dAp) * (A + dAm)) / (2.0 * step);
      const double g = eg.gradient(v, s);
      const double abs_err = std::abs(fd - g);
      c.max_abs_error = std::max(c.max_abs_error, abs_err);
      if (std::abs(g) <= floor) continue;
      ++c.entries_checked;
      const double rel = abs_err / std::abs(g);
      if (rel > c.max_relative_error) {
        c.max_relative_error = rel;
        c.worst_vertex = v;
        c.worst_coordinate = s;
      }
    }
  }
  return c;
}

HessianCheck check_stretch_hessian(const SimplicialSurface& surface, const MatrixX3& f,
                                   double step) {
  const Index n = f.rows();
  const Eigen::MatrixXd H(assemble_stretch_hessian(surface, f));
  Eigen::MatrixXd fd(3 * n, 3 * n);
  MatrixX3 x = f;
  for (int s = 0; s < 3; ++s) {
    for (Index v = 0; v < n; ++v) {
      const double keep = x(v, s);
      x(v, s) = keep + step;
      const MatrixX3 gp = stretch_gradient(surface, x, Execution::serial);
      x(v, s) = keep - step;
      const MatrixX3 gm = stretch_gradient(surface, x, Execution::serial);
      x(v, s) = keep;
      const MatrixX3 d = (gp - gm) / (2.0 * step);
      fd.col(s * n + v) = Eigen::Map<const Eigen::VectorXd>(d.data(), d.size());
    }
  }
  HessianCheck c;
  c.relative_error = (H - fd).cwiseAbs().maxCoeff() / H.cwiseAbs().maxCoeff();
  c.asymmetry = (H - H.transpose()).cwiseAbs().maxCoeff();
  for (int s = 0; s < 3; ++s) {
    Eigen::VectorXd t = Eigen::VectorXd::Zero(3 * n);
    t.segment(s * n, n).setOnes();
    c.translation_residual = std::max(c.translation_residual, (H * t).cwiseAbs().maxCoeff());
  }
  return c;
}

EigenProbeResult smallest_eigenpair(const SparseMatrix& H, const EigenProbeOptions& options) {
  const Index n = H.rows();
  if (H.cols() != n || n == 0) throw ContractError("eigen probe needs a square matrix");
  int applications = 0;
  const double hnorm = std::max(norm_1(H), std::numeric_limits<double>::min());
  // below the Gershgorin bound H - sigma I is positive definite; near zero the
  // shift-invert spectrum separates the eigenvalues closest to zero
  const double sigma = options.target == EigenTarget::smallest_algebraic ? -1.01 * hnorm - 1e-300
                                                                         : -1e-9 * hnorm;
  SparseMatrix shifted = H;
  SparseMatrix I(n, n);
  I.setIdentity();
  shifted -= sigma * I;
  Eigen::SparseLU<SparseMatrix> lu;
  lu.compute(shifted);
  if (lu.info() != Eigen::Success) throw NumericalError("eigen probe: shifted matrix is singular");

  const int k = static_cast<int>(std::min<Index>(options.krylov_dim, n));
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> gauss;
  Eigen::VectorXd start(n);
  for (Index i = 0; i < n; ++i) start[i] = gauss(rng);
  start.normalize();

  EigenProbeResult out;
  for (int restart = 0; restart <= options.max_restarts; ++restart) {
    Eigen::MatrixXd V(n, k + 1);
    Eigen::VectorXd alpha(k), beta(k);
    V.col(0) = start;
    int m = k;
    for (int j = 0; j < k; ++j) {
      Eigen::VectorXd w = lu.solve(V.col(j));
      ++applications;
      alpha[j] = V.col(j).dot(w);
      // full reorthogonalization, twice
      for (int pass = 0; pass < 2; ++pass)
        w -= V.leftCols(j + 1) * (V.leftCols(j + 1).transpose() * w);
      beta[j] = w.norm();
      if (beta[j] <= 1e-14 * std::abs(alpha[j]) || beta[j] == 0.0) {
        m = j + 1;
        break;
      }
      V.col(j + 1) = w / beta[j];
    }
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
    for (int j = 0; j < m; ++j) {
      T(j, j) = alpha[j];
      if (j + 1 < m) T(j, j + 1) = T(j + 1, j) = beta[j];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    Index pick = 0;
    if (options.target == EigenTarget::smallest_algebraic)
      es.eigenvalues().maxCoeff(&pick);
    else
      es.eigenvalues().cwiseAbs().maxCoeff(&pick);
    Eigen::VectorXd x = V.leftCols(m) * es.eigenvectors().col(pick);
    x.normalize();
    // the Rayleigh quotient of the Ritz vector rather than sigma + 1 / theta,
    // which loses digits when theta is large
    const double rq = x.dot(H * x);
    out.eigenvalue = rq;
    out.vector = x;
    out.residual = (H * x - rq * x).norm();
    out.restarts = restart;
    out.iterations = applications;
    if (out.residual <= options.tolerance * hnorm) {
      out.converged = true;
      return out;
    }
    start = x;
  }
  return out;
}

EigenProbeResult stretch_hessian_probe(const SimplicialSurface& surface, const MatrixX3& f,
                                       const EigenProbeOptions& options) {
  return smallest_eigenpair(assemble_stretch_hessian(surface, f), options);
}

}  // namespace sphap
