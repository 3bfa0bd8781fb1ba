#include "oracles.hpp"
#include "sphap/diagnostics.hpp"
#include "sphap/kernels.hpp"
#include "sphap/pipeline.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace sphap;

TEST_CASE("ratio statistics use the population standard deviation") {
  Eigen::VectorXd r(2);
  r << 1.0, 3.0;
  const auto s = ratio_stats(r);
  CHECK(s.mean == 2.0);
  CHECK(s.sd == 1.0);
  CHECK(s.sd_over_mean == 0.5);
  CHECK(s.min == 1.0);
  CHECK(s.max == 3.0);
}

TEST_CASE("area ratio statistics are rotation invariant and zero at the identity") {
  const auto mesh = make_icosphere(3);
  const auto id = project_to_manifold(mesh.vertices());
  CHECK(area_ratio_stats(mesh, id.rows()).sd_over_mean < 1e-12);

  const auto ell = make_icosphere(3, Vector3(1.0, 0.8, 0.6));
  const MatrixX3 f = project_to_manifold(ell.vertices()).rows();
  const Eigen::Matrix3d R =
      Eigen::AngleAxisd(1.1, Vector3(0.3, -1, 2).normalized()).toRotationMatrix();
  const auto a = area_ratio_stats(ell, f);
  const auto b = area_ratio_stats(ell, f * R.transpose());
  CHECK(a.sd_over_mean > 0.01);
  CHECK(b.sd_over_mean == doctest::Approx(a.sd_over_mean).epsilon(1e-12));

  // population SD against a direct computation with Heron areas
  Eigen::VectorXd ratios(ell.num_faces());
  for (Index t = 0; t < ell.num_faces(); ++t) {
    const auto& F = ell.faces();
    ratios[t] = oracle::heron(f.row(F(t, 0)), f.row(F(t, 1)), f.row(F(t, 2))) /
                oracle::heron(ell.vertices().row(F(t, 0)), ell.vertices().row(F(t, 1)),
                              ell.vertices().row(F(t, 2)));
  }
  const double mean = ratios.mean();
  const double sd = std::sqrt((ratios.array() - mean).square().mean());
  CHECK(a.sd_over_mean == doctest::Approx(sd / mean).epsilon(1e-10));
}

TEST_CASE("authalic error normalizes by mean displacement") {
  const auto clean = make_icosphere(2);
  const auto noisy = perturb_vertices(clean, 0.01, 4);
  const double disp = (noisy.vertices() - clean.vertices()).rowwise().norm().sum();
  const double e = authalic_error(noisy, clean, 0.3, 0.1);
  CHECK(e == doctest::Approx(clean.num_vertices() * 0.2 / disp).epsilon(1e-14));
  CHECK_THROWS_AS(authalic_error(clean, clean, 0.3, 0.1), NumericalError);
  CHECK_THROWS_AS(authalic_error(make_icosphere(1), clean, 0.3, 0.1), ContractError);
}

TEST_CASE("finite difference gradient check passes and its error grows with large steps") {
  const auto mesh = make_icosphere(2);
  const MatrixX3 f = oracle::jitter_on_sphere(mesh.vertices(), 0.05, 12);
  const auto fine = check_energy_gradient(mesh, f, 1e-6);
  CHECK(fine.max_relative_error < 1e-6);
  CHECK(fine.entries_checked > 0);
  const auto coarse = check_energy_gradient(mesh, f, 1e-4);
  CHECK(coarse.max_relative_error > fine.max_relative_error);
  CHECK_THROWS_AS(check_energy_gradient(mesh, f, 1e-2), ContractError);
}

TEST_CASE("hessian check on a small sphere") {
  const auto mesh = make_icosphere(1);
  const MatrixX3 f = oracle::jitter_on_sphere(mesh.vertices(), 0.05, 2);
  const auto h = check_stretch_hessian(mesh, f);
  CHECK(h.relative_error < 1e-5);
  CHECK(h.asymmetry == 0.0);
  CHECK(h.translation_residual < 1e-10);
}

TEST_CASE("eigen probe on known spectra") {
  SparseMatrix I(50, 50);
  I.setIdentity();
  auto r = smallest_eigenpair(I);
  CHECK(r.converged);
  CHECK(r.eigenvalue == doctest::Approx(1.0).epsilon(1e-10));

  SparseMatrix D(3, 3);
  D.insert(0, 0) = -2.0;
  D.insert(1, 1) = 1.0;
  D.insert(2, 2) = 3.0;
  EigenProbeOptions o;
  o.target = EigenTarget::smallest_algebraic;
  r = smallest_eigenpair(D, o);
  CHECK(r.converged);
  CHECK(r.eigenvalue == doctest::Approx(-2.0).epsilon(1e-10));
  CHECK(std::abs(r.vector[0]) == doctest::Approx(1.0).epsilon(1e-8));
  o.target = EigenTarget::smallest_magnitude;
  r = smallest_eigenpair(D, o);
  CHECK(r.eigenvalue == doctest::Approx(1.0).epsilon(1e-10));

  // tridiagonal 1D Laplacian with known eigenvalues 2 - 2 cos(k pi / (n + 1))
  const int n = 200;
  std::vector<Eigen::Triplet<double>> t;
  for (int i = 0; i < n; ++i) {
    t.emplace_back(i, i, 2.0);
    if (i + 1 < n) {
      t.emplace_back(i, i + 1, -1.0);
      t.emplace_back(i + 1, i, -1.0);
    }
  }
  SparseMatrix T(n, n);
  T.setFromTriplets(t.begin(), t.end());
  o.target = EigenTarget::smallest_algebraic;
  r = smallest_eigenpair(T, o);
  CHECK(r.converged);
  CHECK(r.eigenvalue == doctest::Approx(2.0 - 2.0 * std::cos(M_PI / (n + 1))).epsilon(1e-8));
  CHECK((T * r.vector - r.eigenvalue * r.vector).norm() ==
        doctest::Approx(r.residual).epsilon(1e-6));
}

TEST_CASE("hessian probe agrees with a dense eigensolver") {
  const auto mesh = make_icosphere(1);
  const MatrixX3 f = oracle::jitter_on_sphere(mesh.vertices(), 0.1, 5);
  const Eigen::MatrixXd H(assemble_stretch_hessian(mesh, f));
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(H).eigenvalues();
  EigenProbeOptions o;
  o.target = EigenTarget::smallest_algebraic;
  const auto a = stretch_hessian_probe(mesh, f, o);
  CHECK(a.converged);
  CHECK(a.eigenvalue == doctest::Approx(ev[0]).epsilon(1e-8));
  o.target = EigenTarget::smallest_magnitude;
  const auto m = stretch_hessian_probe(mesh, f, o);
  CHECK(m.converged);
  CHECK(std::abs(m.eigenvalue) <= ev.cwiseAbs().minCoeff() + 1e-8 * ev.cwiseAbs().maxCoeff());
}

TEST_CASE("remaining kernels agree bit for bit between serial and parallel paths") {
  const auto mesh = make_bumpy_sphere(3, 0.2, 3);
  const MatrixX3 f = oracle::jitter_on_sphere(project_to_manifold(mesh.vertices()).rows(), 0.01, 3);
  CHECK(kernels::face_orientations_serial(mesh, f) == kernels::face_orientations_parallel(mesh, f));
  CHECK(kernels::area_ratios_serial(mesh, f) == kernels::area_ratios_parallel(mesh, f));
  const auto a = area_ratio_stats(mesh, f, Execution::serial);
  const auto b = area_ratio_stats(mesh, f, Execution::parallel);
  CHECK(a.sd_over_mean == b.sd_over_mean);
  const auto fs = fold_report(mesh, f, Execution::serial);
  const auto fp = fold_report(mesh, f, Execution::parallel);
  CHECK(fs.folds == fp.folds);
  CHECK(fs.degenerate == fp.degenerate);
}

TEST_CASE("pipeline runs are deterministic and serial equals parallel") {
  const auto mesh = make_icosphere(3, Vector3(1.0, 0.8, 0.6));
  ParameterizeOptions o;
  o.rgd.max_iters = 30;
  auto csv = [&](Execution e) {
    o.exec = e;
    const auto r = parameterize(mesh, o);
    std::ostringstream s;
    write_records_csv(s, r.records, false);
    return std::make_pair(s.str(), r);
  };
  const auto [s1, r1] = csv(Execution::parallel);
  const auto [s2, r2] = csv(Execution::parallel);
  const auto [s3, r3] = csv(Execution::serial);
  CHECK(s1 == s2);
  CHECK(s1 == s3);
  CHECK(r1.f.rows() == r3.f.rows());
  CHECK(s1.rfind("iter,E_S,E_A,E,sd_over_mean,grad_norm,alpha,folds,elapsed_s\n", 0) == 0);
  CHECK(static_cast<int>(r1.records.size()) == r1.fpi_rows + r1.rgd_iterations);
  CHECK(r1.folds == 0);
  CHECK(r1.energy.authalic < r1.records.front().authalic);
  for (std::size_t k = 0; k < r1.records.size(); ++k) CHECK(r1.records[k].iter == int(k) + 1);
  for (int k = 0; k < r1.fpi_rows; ++k) CHECK(std::isnan(r1.records[k].grad_norm));
}
