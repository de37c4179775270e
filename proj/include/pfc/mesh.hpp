// mesh.hpp
// Structured 1D/2D vertex-centered grids with trapezoid quadrature, the
// piecewise-linear stiffness form, Robin/Neumann boundary closures, traces,
// and discrete norms. Everything downstream builds on these operators.
#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "pfc/errors.hpp"

namespace pfc {

// One scalar value per mesh node.
struct Field {
  std::vector<double> v;

  Field() = default;
  explicit Field(std::size_t n, double value = 0.0) : v(n, value) {}

  double& operator[](std::size_t i) { return v[i]; }
  double operator[](std::size_t i) const { return v[i]; }
  std::size_t size() const { return v.size(); }
};

// One scalar value per boundary node (ordered as mesh.boundary_nodes).
struct BoundaryField {
  std::vector<double> v;

  BoundaryField() = default;
  explicit BoundaryField(std::size_t n, double value = 0.0) : v(n, value) {}

  double& operator[](std::size_t i) { return v[i]; }
  double operator[](std::size_t i) const { return v[i]; }
  std::size_t size() const { return v.size(); }
};

enum class BcKind { NeumannHomogeneous, Robin };

// Boundary closure for the Laplacian: homogeneous Neumann, or Robin with
// coefficient alpha and source g (g plays the role of alpha*u).
struct BcSpec {
  BcKind kind = BcKind::NeumannHomogeneous;
  BoundaryField alpha;
  BoundaryField source;

  static BcSpec neumann() { return BcSpec{}; }
  static BcSpec robin(BoundaryField a, BoundaryField g) {
    for (double ai : a.v)
      if (!(ai > 0.0))
        throw ValidationError("bc.alpha", "Robin closure requires alpha > 0");
    return BcSpec{BcKind::Robin, std::move(a), std::move(g)};
  }
};

struct SpatialMesh {
  int dimension = 1;
  std::array<double, 2> extents{1.0, 1.0};
  std::array<int, 2> nodes_per_axis{0, 1};
  std::array<double, 2> spacing{0.0, 0.0};
  int node_count = 0;

  std::vector<int> interior_nodes;
  std::vector<int> boundary_nodes;
  std::vector<int> boundary_slot;  // node -> position in boundary_nodes, -1 if interior

  std::vector<double> domain_weights;    // per node, sums to |Omega|
  std::vector<double> boundary_weights;  // per boundary node, sums to |Gamma|

  Eigen::SparseMatrix<double> stiffness;  // piecewise-linear grad-grad form

  bool is_boundary(int node) const { return boundary_slot[node] >= 0; }

  std::array<double, 2> coords(int node) const {
    if (dimension == 1) return {node * spacing[0], 0.0};
    int nx = nodes_per_axis[0];
    return {(node % nx) * spacing[0], (node / nx) * spacing[1]};
  }
};

inline SpatialMesh build_mesh(int dimension, std::array<double, 2> extents,
                              std::array<int, 2> node_counts) {
  if (dimension != 1 && dimension != 2)
    throw ValidationError("mesh.dimension", "must be 1 or 2");
  for (int d = 0; d < dimension; ++d) {
    if (node_counts[d] < 3)
      throw ValidationError("mesh.nodes", "need at least 3 nodes per axis");
    if (!(extents[d] > 0.0))
      throw ValidationError("mesh.extent", "extents must be > 0");
  }

  SpatialMesh m;
  m.dimension = dimension;
  m.extents = extents;
  m.nodes_per_axis = node_counts;
  if (dimension == 1) m.nodes_per_axis[1] = 1;

  int nx = m.nodes_per_axis[0];
  int ny = (dimension == 2) ? m.nodes_per_axis[1] : 1;
  m.spacing[0] = extents[0] / (nx - 1);
  m.spacing[1] = (dimension == 2) ? extents[1] / (ny - 1) : 0.0;
  m.node_count = nx * ny;

  auto trapezoid = [](int n, double h) {
    std::vector<double> w(n, h);
    w.front() = 0.5 * h;
    w.back() = 0.5 * h;
    return w;
  };
  std::vector<double> wx = trapezoid(nx, m.spacing[0]);
  std::vector<double> wy =
      (dimension == 2) ? trapezoid(ny, m.spacing[1]) : std::vector<double>{1.0};

  m.domain_weights.resize(m.node_count);
  m.boundary_slot.assign(m.node_count, -1);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      int node = i + nx * j;
      m.domain_weights[node] = wx[i] * wy[j];
      bool bdry = (dimension == 1) ? (i == 0 || i == nx - 1)
                                   : (i == 0 || i == nx - 1 || j == 0 || j == ny - 1);
      if (bdry) {
        m.boundary_slot[node] = static_cast<int>(m.boundary_nodes.size());
        m.boundary_nodes.push_back(node);
      } else {
        m.interior_nodes.push_back(node);
      }
    }

  // Boundary quadrature: unit point weights in 1D (|Gamma| = 2); per-edge
  // trapezoid accumulation in 2D, so corners pick up hx/2 + hy/2.
  m.boundary_weights.assign(m.boundary_nodes.size(), 0.0);
  if (dimension == 1) {
    for (auto& w : m.boundary_weights) w = 1.0;
  } else {
    auto add = [&](int node, double w) { m.boundary_weights[m.boundary_slot[node]] += w; };
    for (int i = 0; i < nx; ++i) {
      add(i + nx * 0, wx[i]);
      add(i + nx * (ny - 1), wx[i]);
    }
    for (int j = 0; j < ny; ++j) {
      add(0 + nx * j, wy[j]);
      add((nx - 1) + nx * j, wy[j]);
    }
  }

  // Stiffness: 1D cell assembly (1/h)[[1,-1],[-1,1]]; in 2D, tensor product
  // with the trapezoid weights of the transverse axis. Symmetric, PSD, zero
  // row sums, nonpositive off-diagonals.
  std::vector<Eigen::Triplet<double>> trip;
  auto couple = [&](int a, int b, double coeff) {
    trip.emplace_back(a, a, coeff);
    trip.emplace_back(b, b, coeff);
    trip.emplace_back(a, b, -coeff);
    trip.emplace_back(b, a, -coeff);
  };
  if (dimension == 1) {
    for (int i = 0; i + 1 < nx; ++i) couple(i, i + 1, 1.0 / m.spacing[0]);
  } else {
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i + 1 < nx; ++i)
        couple(i + nx * j, i + 1 + nx * j, wy[j] / m.spacing[0]);
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j + 1 < ny; ++j)
        couple(i + nx * j, i + nx * (j + 1), wx[i] / m.spacing[1]);
  }
  m.stiffness.resize(m.node_count, m.node_count);
  m.stiffness.setFromTriplets(trip.begin(), trip.end());
  m.stiffness.makeCompressed();
  return m;
}

// Action of -Delta_h with the boundary closure folded in (weak-form stiffness
// plus the Robin boundary term, divided by the lumped mass).
inline Field apply_laplacian(const SpatialMesh& mesh, const Field& field, const BcSpec& bc) {
  if (field.size() != static_cast<std::size_t>(mesh.node_count))
    throw ShapeMismatch("apply_laplacian field", mesh.node_count,
                        static_cast<long>(field.size()));
  Eigen::Map<const Eigen::VectorXd> f(field.v.data(), field.size());
  Eigen::VectorXd y = mesh.stiffness * f;
  if (bc.kind == BcKind::Robin) {
    for (std::size_t b = 0; b < mesh.boundary_nodes.size(); ++b) {
      int node = mesh.boundary_nodes[b];
      y[node] += mesh.boundary_weights[b] * (bc.alpha[b] * field[node] - bc.source[b]);
    }
  }
  Field out(field.size());
  for (int i = 0; i < mesh.node_count; ++i) out[i] = y[i] / mesh.domain_weights[i];
  return out;
}

inline double integrate_domain(const SpatialMesh& mesh, const Field& f) {
  if (f.size() != static_cast<std::size_t>(mesh.node_count))
    throw ShapeMismatch("integrate_domain", mesh.node_count, static_cast<long>(f.size()));
  double s = 0.0;
  for (int i = 0; i < mesh.node_count; ++i) s += mesh.domain_weights[i] * f[i];
  return s;
}

inline double integrate_boundary(const SpatialMesh& mesh, const BoundaryField& f) {
  if (f.size() != mesh.boundary_nodes.size())
    throw ShapeMismatch("integrate_boundary", static_cast<long>(mesh.boundary_nodes.size()),
                        static_cast<long>(f.size()));
  double s = 0.0;
  for (std::size_t b = 0; b < f.size(); ++b) s += mesh.boundary_weights[b] * f[b];
  return s;
}

inline double l2_norm(const SpatialMesh& mesh, const Field& f) {
  double s = 0.0;
  for (int i = 0; i < mesh.node_count; ++i) s += mesh.domain_weights[i] * f[i] * f[i];
  return std::sqrt(s);
}

// Cell-midpoint gradient seminorm; coincides with sqrt(f' K f), exact for
// piecewise-linear interpolants.
inline double h1_seminorm(const SpatialMesh& mesh, const Field& f) {
  Eigen::Map<const Eigen::VectorXd> x(f.v.data(), f.size());
  double q = x.dot(mesh.stiffness * x);
  return std::sqrt(std::max(q, 0.0));
}

inline double linf_norm(const Field& f) {
  double s = 0.0;
  for (double x : f.v) s = std::max(s, std::abs(x));
  return s;
}

struct FieldNorms {
  double l2;
  double h1_semi;
  double linf;
};

inline FieldNorms norms(const SpatialMesh& mesh, const Field& f) {
  return {l2_norm(mesh, f), h1_seminorm(mesh, f), linf_norm(f)};
}

inline double l2_boundary_norm(const SpatialMesh& mesh, const BoundaryField& f) {
  double s = 0.0;
  for (std::size_t b = 0; b < f.size(); ++b) s += mesh.boundary_weights[b] * f[b] * f[b];
  return std::sqrt(s);
}

// Full V-norm: sqrt(L2^2 + |.|_H1^2).
inline double h1_norm(const SpatialMesh& mesh, const Field& f) {
  double a = l2_norm(mesh, f), b = h1_seminorm(mesh, f);
  return std::sqrt(a * a + b * b);
}

inline BoundaryField trace(const SpatialMesh& mesh, const Field& f) {
  BoundaryField out(mesh.boundary_nodes.size());
  for (std::size_t b = 0; b < out.size(); ++b) out[b] = f[mesh.boundary_nodes[b]];
  return out;
}

}  // namespace pfc
