#include "sphap/registration.hpp"

#include "sphap/stretch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sphap {

LandmarkObjective::LandmarkObjective(const SimplicialSurface& sphere_mesh,
                                     std::vector<int> landmarks, MatrixX3 targets, double lambda,
                                     Execution exec)
    : mesh_(sphere_mesh),
      landmarks_(std::move(landmarks)),
      targets_(std::move(targets)),
      lambda_(lambda),
      exec_(exec) {
  if (static_cast<Index>(landmarks_.size()) != targets_.rows())
    throw ContractError("one target per landmark required");
  if (!(lambda_ >= 0.0)) throw ContractError("lambda must be nonnegative");
}

double LandmarkObjective::penalty(const MatrixX3& h) const {
  double p = 0.0;
  for (std::size_t i = 0; i < landmarks_.size(); ++i)
    p += (h.row(landmarks_[i]) - targets_.row(i)).squaredNorm();
  return lambda_ * p;
}

double LandmarkObjective::value(const MatrixX3& h) const {
  return stretch_energy(mesh_, h, exec_).stretch + penalty(h);
}

double LandmarkObjective::value_and_gradient(const MatrixX3& h, MatrixX3& gradient) const {
  const SparseMatrix L = assemble_laplacian(mesh_, h, exec_);
  gradient = 2.0 * (L * h);
  for (std::size_t i = 0; i < landmarks_.size(); ++i)
    gradient.row(landmarks_[i]) += 2.0 * lambda_ * (h.row(landmarks_[i]) - targets_.row(i));
  return stretch_energy(mesh_, h, exec_).stretch + penalty(h);
}

double mean_geodesic_distance(const MatrixX3& a, const std::vector<int>& ia, const MatrixX3& b,
                              const std::vector<int>& ib) {
  if (ia.size() != ib.size() || ia.empty()) throw ContractError("landmark lists differ in size");
  double sum = 0.0;
  for (std::size_t i = 0; i < ia.size(); ++i) {
    const Vector3 p = a.row(ia[i]).normalized();
    const Vector3 q = b.row(ib[i]).normalized();
    // atan2 form stays accurate for nearly equal points
    sum += std::atan2(p.cross(q).norm(), p.dot(q));
  }
  return sum / static_cast<double>(ia.size());
}

SphereLocator::SphereLocator(const MatrixX3& vertices, const FaceMatrix& faces)
    : vertices_(vertices), faces_(faces) {
  res_ = std::clamp(static_cast<int>(std::cbrt(static_cast<double>(faces.rows()))), 1, 64);
  cells_.assign(static_cast<std::size_t>(res_) * res_ * res_, {});
  for (Index t = 0; t < faces.rows(); ++t) {
    const Vector3 a = vertices.row(faces(t, 0));
    const Vector3 b = vertices.row(faces(t, 1));
    const Vector3 c = vertices.row(faces(t, 2));
    const Vector3 n = (b - a).cross(c - a);
    const double len = n.norm();
    // a unit direction through the triangle can sit up to (1 - plane distance) off the chord
    const double pad = len > 0.0 ? 1.0 - std::abs(n.dot(a)) / len : 1.0;
    const Vector3 lo = a.cwiseMin(b).cwiseMin(c).array() - pad;
    const Vector3 hi = a.cwiseMax(b).cwiseMax(c).array() + pad;
    auto to_cell = [&](double x) {
      return std::clamp(static_cast<int>((x + 1.0) * 0.5 * res_), 0, res_ - 1);
    };
    for (int i = to_cell(lo.x()); i <= to_cell(hi.x()); ++i)
      for (int j = to_cell(lo.y()); j <= to_cell(hi.y()); ++j)
        for (int k = to_cell(lo.z()); k <= to_cell(hi.z()); ++k)
          cells_[(static_cast<std::size_t>(i) * res_ + j) * res_ + k].push_back(
              static_cast<int>(t));
  }
}

Index SphereLocator::cell_of(const Vector3& p) const {
  auto to_cell = [&](double x) {
    return std::clamp(static_cast<int>((x + 1.0) * 0.5 * res_), 0, res_ - 1);
  };
  return (static_cast<Index>(to_cell(p.x())) * res_ + to_cell(p.y())) * res_ + to_cell(p.z());
}

bool SphereLocator::barycentric(Index t, const Vector3& q, Vector3& w) const {
  const Vector3 a = vertices_.row(faces_(t, 0));
  const Vector3 b = vertices_.row(faces_(t, 1));
  const Vector3 c = vertices_.row(faces_(t, 2));
  // q = w0 a + w1 b + w2 c up to a positive scale: Cramer's rule on [a b c]
  const double det = a.dot(b.cross(c));
  if (!(std::abs(det) > 0.0)) return false;
  w << q.dot(b.cross(c)), a.dot(q.cross(c)), a.dot(b.cross(q));
  w /= det;
  const double s = w.sum();
  if (!(s > 0.0)) return false;
  w /= s;
  return true;
}

SurfaceLocation SphereLocator::locate(const Vector3& direction) const {
  const Vector3 q = direction.normalized();
  SurfaceLocation best;
  double best_min = -std::numeric_limits<double>::infinity();
  Vector3 w;
  for (int t : cells_[cell_of(q)]) {
    if (!barycentric(t, q, w)) continue;
    if (w.minCoeff() > best_min) {
      best_min = w.minCoeff();
      best.face = t;
      best.weights = w;
    }
  }
  if (best.face >= 0 && best_min >= -1e-12) return best;

  // fallback: nearest face by distance from q to the face centroid direction
  best.exact = false;
  double best_d = std::numeric_limits<double>::infinity();
  for (Index t = 0; t < faces_.rows(); ++t) {
    const Vector3 ctr = (vertices_.row(faces_(t, 0)) + vertices_.row(faces_(t, 1)) +
                         vertices_.row(faces_(t, 2)))
                            .transpose() /
                        3.0;
    const double d = (ctr.normalized() - q).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best.face = t;
    }
  }
  if (barycentric(best.face, q, w)) {
    w = w.cwiseMax(0.0);
    best.weights = w / w.sum();
  } else {
    best.weights = Vector3::Constant(1.0 / 3.0);
  }
  return best;
}

Composition compose_maps(const MatrixX3& query, const SimplicialSurface& m1,
                         const SphericalMapping& h1) {
  if (h1.size() != m1.num_vertices()) throw ContractError("h1 does not match M1");
  const SphereLocator locator(h1.rows(), m1.faces());
  Composition out;
  out.points.resize(query.rows(), 3);
  out.locations.resize(query.rows());
  const auto& F = m1.faces();
  const auto& V = m1.vertices();
  std::vector<char> fallback(query.rows(), 0);
#pragma omp parallel for schedule(dynamic, 64)
  for (Index v = 0; v < query.rows(); ++v) {
    const auto loc = locator.locate(query.row(v).transpose());
    fallback[v] = loc.exact ? 0 : 1;
    out.locations[v] = {loc.face, loc.weights};
    out.points.row(v) = loc.weights[0] * V.row(F(loc.face, 0)) +
                        loc.weights[1] * V.row(F(loc.face, 1)) +
                        loc.weights[2] * V.row(F(loc.face, 2));
  }
  for (char b : fallback) out.fallbacks += b;
  return out;
}

MatrixX3 homotopy(const MatrixX3& source, const MatrixX3& target, double t) {
  if (source.rows() != target.rows()) throw ContractError("homotopy: row count mismatch");
  if (!(t >= 0.0 && t <= 1.0)) throw ContractError("homotopy parameter must lie in [0, 1]");
  if (t == 0.0) return source;
  if (t == 1.0) return target;
  return (1.0 - t) * source + t * target;
}

namespace {

struct Aligned {
  MatrixX3 h;
  RgdStatus status;
  int iterations;
};

Aligned align(const SimplicialSurface& sphere_mesh, const SphericalMapping& start,
              const std::vector<int>& landmarks, const MatrixX3& targets,
              const RegistrationOptions& options) {
  const LandmarkObjective objective(sphere_mesh, landmarks, targets, options.lambda,
                                    options.exec);
  std::vector<int> rows(landmarks.size());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = static_cast<int>(i);
  RgdConfig config;
  config.max_iters = options.max_iters;
  config.grad_tol = 0.0;
  config.energy_tol = 0.0;
  config.line_search = options.line_search;
  config.stop_when = [&](const MatrixX3& h) {
    return mean_geodesic_distance(h, landmarks, targets, rows) < options.mismatch_tol;
  };
  const auto r = riemannian_descent(objective, start, config);
  return {r.f, r.status, r.iterations};
}

}  // namespace

RegistrationResult register_surfaces(const SimplicialSurface& m0, const SphericalMapping& f0,
                                     const SimplicialSurface& m1, const SphericalMapping& f1,
                                     const std::vector<LandmarkPair>& landmarks,
                                     const RegistrationOptions& options) {
  if (landmarks.empty()) throw ContractError("registration needs at least one landmark pair");
  if (f0.size() != m0.num_vertices() || f1.size() != m1.num_vertices())
    throw ContractError("spherical maps do not match their meshes");

  std::vector<int> p, q;
  for (const auto& lm : landmarks) {
    p.push_back(lm.source_index);
    q.push_back(lm.target_index);
  }
  MatrixX3 c(landmarks.size(), 3);
  for (std::size_t i = 0; i < landmarks.size(); ++i) {
    Vector3 mid = 0.5 * (f0.row(p[i]) + f1.row(q[i]));
    if (options.normalize_midpoints) {
      if (!(mid.norm() > 1e-14))
        throw NumericalError("landmark pair " + std::to_string(i + 1) + " is antipodal");
      mid.normalize();
    }
    c.row(i) = mid.transpose();
  }

  // the spheres themselves serve as reference meshes
  const SimplicialSurface s0(f0.rows(), m0.faces(), TopologyCheck::none);
  const SimplicialSurface s1(f1.rows(), m1.faces(), TopologyCheck::none);
  const auto a0 = align(s0, f0, p, c, options);
  const auto a1 = align(s1, f1, q, c, options);

  RegistrationResult r{SphericalMapping::from_rows(a0.h, 1e-10),
                       SphericalMapping::from_rows(a1.h, 1e-10),
                       c,
                       mean_geodesic_distance(f0.rows(), p, f1.rows(), q),
                       0.0,
                       a0.status,
                       a1.status,
                       a0.iterations,
                       a1.iterations,
                       {},
                       {},
                       0};
  r.mismatch_after = mean_geodesic_distance(r.h0.rows(), p, r.h1.rows(), q);
  auto comp = compose_maps(r.h0.rows(), m1, r.h1);
  r.composed = std::move(comp.points);
  r.locations = std::move(comp.locations);
  r.fallback_locations = comp.fallbacks;
  return r;
}

}  // namespace sphap
