#include "sphap/linear_solve.hpp"

#include <Eigen/IterativeLinearSolvers>

#include <cmath>
#include <limits>
#include <sstream>

namespace sphap {

double norm_inf(const SparseMatrix& A) {
  Eigen::VectorXd rows = Eigen::VectorXd::Zero(A.rows());
  for (Index k = 0; k < A.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(A, k); it; ++it) rows[it.row()] += std::abs(it.value());
  return A.rows() ? rows.maxCoeff() : 0.0;
}

double norm_1(const SparseMatrix& A) {
  double best = 0.0;
  for (Index k = 0; k < A.outerSize(); ++k) {
    double col = 0.0;
    for (SparseMatrix::InnerIterator it(A, k); it; ++it) col += std::abs(it.value());
    best = std::max(best, col);
  }
  return best;
}

double backward_error(const SparseMatrix& A, const Eigen::VectorXd& x, const Eigen::VectorXd& b) {
  const double r = (A * x - b).lpNorm<Eigen::Infinity>();
  const double scale = norm_inf(A) * x.lpNorm<Eigen::Infinity>() + b.lpNorm<Eigen::Infinity>();
  if (scale == 0.0) return r == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return r / scale;
}

double inverse_norm1_estimate(Eigen::SparseLU<SparseMatrix>& lu, Index n) {
  // Hager (1984), as refined by Higham: at most five sweeps.
  Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  double est = 0.0;
  Index last = -1;
  for (int sweep = 0; sweep < 5; ++sweep) {
    const Eigen::VectorXd y = lu.solve(x);
    est = y.lpNorm<1>();
    const Eigen::VectorXd xi = y.unaryExpr([](double v) { return v >= 0.0 ? 1.0 : -1.0; });
    const Eigen::VectorXd z = lu.transpose().solve(xi);
    Index j = 0;
    const double zmax = z.cwiseAbs().maxCoeff(&j);
    if (sweep > 0 && (zmax <= z.dot(x) || j == last)) break;
    x.setZero();
    x[j] = 1.0;
    last = j;
  }
  return est;
}

double condition_estimate_1norm(const SparseMatrix& A) {
  Eigen::SparseLU<SparseMatrix> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
  return norm_1(A) * inverse_norm1_estimate(lu, A.rows());
}

namespace {

[[noreturn]] void fail(const std::string& what, double cond) {
  std::ostringstream msg;
  msg << what << " (estimated 1-norm condition number " << cond << ")";
  throw NumericalError(msg.str());
}

}  // namespace

Eigen::MatrixXd solve_sparse(const SparseMatrix& A, const Eigen::MatrixXd& B,
                             const SolveOptions& options, SolveReport* report) {
  if (A.rows() != A.cols()) throw ContractError("solve_sparse: matrix is not square");
  if (B.rows() != A.rows()) throw ContractError("solve_sparse: right-hand side has wrong size");
  const Index n = A.rows();
  SolverKind kind = options.kind;
  if (kind == SolverKind::automatic)
    kind = n > options.iterative_threshold ? SolverKind::iterative : SolverKind::direct;

  SolveReport rep;
  rep.used = kind;
  Eigen::MatrixXd X(n, B.cols());

  if (kind == SolverKind::direct) {
    Eigen::SparseLU<SparseMatrix> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success)
      fail("sparse LU failed: " + lu.lastErrorMessage(), std::numeric_limits<double>::infinity());
    X = lu.solve(B);
    for (Index c = 0; c < B.cols(); ++c) {
      double err = backward_error(A, X.col(c), B.col(c));
      if (!(err <= options.residual_tolerance)) {
        X.col(c) += lu.solve(Eigen::VectorXd(B.col(c) - A * X.col(c)));
        rep.refined = true;
        err = backward_error(A, X.col(c), B.col(c));
      }
      if (!(err <= options.residual_tolerance) || !X.col(c).allFinite())
        fail("linear solve missed the residual tolerance (backward error " +
                 std::to_string(err) + ")",
             norm_1(A) * inverse_norm1_estimate(lu, n));
      rep.backward_error = std::max(rep.backward_error, err);
    }
  } else {
    Eigen::BiCGSTAB<SparseMatrix, Eigen::DiagonalPreconditioner<double>> it;
    // the solver's own criterion is relative to ||b||; tighten it and check ours afterwards
    it.setTolerance(options.residual_tolerance * 1e-2);
    it.setMaxIterations(options.max_iterations);
    it.compute(A);
    for (Index c = 0; c < B.cols(); ++c) {
      X.col(c) = it.solve(B.col(c));
      double err = backward_error(A, X.col(c), B.col(c));
      if (!(err <= options.residual_tolerance)) {
        X.col(c) = it.solveWithGuess(B.col(c), X.col(c));
        rep.refined = true;
        err = backward_error(A, X.col(c), B.col(c));
      }
      if (!(err <= options.residual_tolerance) || !X.col(c).allFinite())
        fail("iterative solve missed the residual tolerance after " +
                 std::to_string(it.iterations()) + " iterations",
             condition_estimate_1norm(A));
      rep.backward_error = std::max(rep.backward_error, err);
    }
  }
  if (report) *report = rep;
  return X;
}

}  // namespace sphap
