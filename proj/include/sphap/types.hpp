#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <Eigen/SparseCore>

#include <stdexcept>
#include <string>

namespace sphap {

using Index = Eigen::Index;

/// n x 3 array of per-vertex coordinates, column s holds coordinate s of every
/// vertex, so column-major storage is exactly vec(f).
using MatrixX3 = Eigen::Matrix<double, Eigen::Dynamic, 3>;
using FaceMatrix = Eigen::Matrix<int, Eigen::Dynamic, 3>;
using SparseMatrix = Eigen::SparseMatrix<double>;
using Vector3 = Eigen::Vector3d;

/// Loop scheduling for the per-face and per-vertex kernels. Both paths produce
/// bit-identical results; `serial` is the reference.
enum class Execution { serial, parallel };

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed mesh or landmark file.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Mesh is not a closed genus-zero 2-manifold, or indices are out of range.
class TopologyError : public Error {
 public:
  using Error::Error;
};

/// Caller violated a precondition (shape mismatch, out-of-range argument).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Singular systems, degenerate image faces, failed normalizations.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class DegenerateFaceError : public NumericalError {
 public:
  DegenerateFaceError(Index face, const std::string& what)
      : NumericalError(what + " (face " + std::to_string(face) + ")"), face_(face) {}
  Index face() const { return face_; }

 private:
  Index face_;
};

}  // namespace sphap
