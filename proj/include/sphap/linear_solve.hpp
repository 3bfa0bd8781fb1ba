#pragma once

#include "sphap/types.hpp"

#include <Eigen/SparseLU>

#include <memory>

namespace sphap {

enum class SolverKind { automatic, direct, iterative };

struct SolveOptions {
  SolverKind kind = SolverKind::automatic;
  /// Per column: ||A x - b|| <= tol (||A|| ||x|| + ||b||), infinity norms.
  double residual_tolerance = 1e-10;
  /// automatic switches to BiCGSTAB above this many unknowns.
  Index iterative_threshold = 500000;
  int max_iterations = 10000;
};

struct SolveReport {
  SolverKind used = SolverKind::direct;
  double backward_error = 0.0;  // worst column
  bool refined = false;         // one refinement step was applied
};

/// Solves A X = B for square sparse A, B with any number of columns.
/// Throws NumericalError (with a 1-norm condition estimate when one is
/// available) if the factorization fails or the residual contract is missed.
Eigen::MatrixXd solve_sparse(const SparseMatrix& A, const Eigen::MatrixXd& B,
                             const SolveOptions& options = {}, SolveReport* report = nullptr);

/// Normwise backward error ||A x - b||_inf / (||A||_inf ||x||_inf + ||b||_inf).
double backward_error(const SparseMatrix& A, const Eigen::VectorXd& x, const Eigen::VectorXd& b);

double norm_inf(const SparseMatrix& A);
double norm_1(const SparseMatrix& A);

/// Hager's estimate of ||A^-1||_1 from an existing factorization.
double inverse_norm1_estimate(Eigen::SparseLU<SparseMatrix>& lu, Index n);

/// Estimate of cond_1(A); +inf if A cannot be factored.
double condition_estimate_1norm(const SparseMatrix& A);

}  // namespace sphap
