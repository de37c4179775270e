// trajectory.hpp
// Time-indexed node fields on Omega and boundary fields on Gamma, plus the
// discrete space-time norms used throughout (right-endpoint rectangle rule
// in time, matching the implicit stepping).
#pragma once

#include <cmath>
#include <vector>

#include "pfc/mesh.hpp"

namespace pfc {

// N+1 snapshots of a domain field (indices 0..N at times n*dt).
struct Trajectory {
  std::vector<Field> snaps;

  Trajectory() = default;
  Trajectory(int steps, std::size_t nodes, double value = 0.0)
      : snaps(steps + 1, Field(nodes, value)) {}

  int steps() const { return static_cast<int>(snaps.size()) - 1; }
  Field& operator[](std::size_t n) { return snaps[n]; }
  const Field& operator[](std::size_t n) const { return snaps[n]; }
};

// N+1 snapshots of a boundary field.
struct BoundaryTrajectory {
  std::vector<BoundaryField> snaps;

  BoundaryTrajectory() = default;
  BoundaryTrajectory(int steps, std::size_t bnodes, double value = 0.0)
      : snaps(steps + 1, BoundaryField(bnodes, value)) {}

  int steps() const { return static_cast<int>(snaps.size()) - 1; }
  BoundaryField& operator[](std::size_t n) { return snaps[n]; }
  const BoundaryField& operator[](std::size_t n) const { return snaps[n]; }
};

inline Field field_diff(const Field& a, const Field& b) {
  Field d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

// L2(Q) distance between trajectories on the same mesh and step grid.
inline double l2q_distance(const SpatialMesh& mesh, const Trajectory& a,
                           const Trajectory& b, double dt) {
  double s = 0.0;
  for (int n = 1; n <= a.steps(); ++n) {
    double l2 = l2_norm(mesh, field_diff(a[n], b[n]));
    s += dt * l2 * l2;
  }
  return std::sqrt(s);
}

// L2(0,T;L2(Gamma)) norm, right endpoint.
inline double l2_sigma_norm(const SpatialMesh& mesh, const BoundaryTrajectory& u, double dt) {
  double s = 0.0;
  for (int n = 1; n <= u.steps(); ++n) {
    double l2 = l2_boundary_norm(mesh, u[n]);
    s += dt * l2 * l2;
  }
  return std::sqrt(s);
}

inline double l2_sigma_inner(const SpatialMesh& mesh, const BoundaryTrajectory& a,
                             const BoundaryTrajectory& b, double dt) {
  double s = 0.0;
  for (int n = 1; n <= a.steps(); ++n)
    for (std::size_t k = 0; k < a[n].size(); ++k)
      s += dt * mesh.boundary_weights[k] * a[n][k] * b[n][k];
  return s;
}

// Discrete ||v_t||_{L2(0,T;L2(Gamma))} via forward differences.
inline double time_derivative_sigma_norm(const SpatialMesh& mesh,
                                         const BoundaryTrajectory& v, double dt) {
  double s = 0.0;
  for (int n = 0; n < v.steps(); ++n)
    for (std::size_t k = 0; k < v[n].size(); ++k) {
      double d = (v[n + 1][k] - v[n][k]) / dt;
      s += dt * mesh.boundary_weights[k] * d * d;
    }
  return std::sqrt(s);
}

// H1(0,T;L2(Gamma)) norm of a boundary trajectory.
inline double h1t_sigma_norm(const SpatialMesh& mesh, const BoundaryTrajectory& v, double dt) {
  double a = l2_sigma_norm(mesh, v, dt);
  double b = time_derivative_sigma_norm(mesh, v, dt);
  return std::sqrt(a * a + b * b);
}

// Piecewise-linear refinement in time: N steps -> factor*N steps.
inline BoundaryTrajectory refine_in_time(const BoundaryTrajectory& v, int factor) {
  int n_old = v.steps();
  BoundaryTrajectory out(n_old * factor, v[0].size());
  for (int n = 0; n <= n_old * factor; ++n) {
    int base = n / factor;
    int rem = n % factor;
    if (rem == 0) {
      out[n] = v[base];
    } else {
      double t = static_cast<double>(rem) / factor;
      for (std::size_t k = 0; k < v[0].size(); ++k)
        out[n][k] = (1.0 - t) * v[base][k] + t * v[base + 1][k];
    }
  }
  return out;
}

}  // namespace pfc
