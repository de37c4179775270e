// cost.hpp
// Tracking-type cost functional: terminal rho misfit, quadratic control
// cost on Sigma, and mu tracking over Q.
#pragma once

#include "pfc/state_solver.hpp"

namespace pfc {

struct CostSpec {
  double beta1 = 0.0;  // control weight
  double beta2 = 0.0;  // tracking weight
  Field rho_target;    // target terminal order parameter
  Trajectory mu_target;  // target chemical potential over time

  static void validate(const CostSpec& c) {
    if (!(c.beta1 >= 0.0)) throw ValidationError("cost.beta1", "must be >= 0");
    if (!(c.beta2 >= 0.0)) throw ValidationError("cost.beta2", "must be >= 0");
  }
};

struct CostBreakdown {
  double terminal = 0.0;
  double control = 0.0;
  double tracking = 0.0;
  double total() const { return terminal + control + tracking; }
};

inline CostBreakdown cost_eval(const SpatialMesh& mesh, const StateSolution& state,
                               const BoundaryTrajectory& u, const CostSpec& cost) {
  CostSpec::validate(cost);
  const int N = state.steps;
  const double dt = state.dt;
  if (u.steps() != N) throw ShapeMismatch("cost control steps", N, u.steps());
  if (cost.beta2 != 0.0 && cost.mu_target.steps() != N)
    throw ShapeMismatch("cost.mu_target steps", N, cost.mu_target.steps());

  CostBreakdown out;
  for (int i = 0; i < mesh.node_count; ++i) {
    double d = state.rho[N][i] - cost.rho_target[i];
    out.terminal += 0.5 * mesh.domain_weights[i] * d * d;
  }
  for (int n = 1; n <= N; ++n) {
    for (std::size_t b = 0; b < u[n].size(); ++b)
      out.control += 0.5 * cost.beta1 * dt * mesh.boundary_weights[b] * u[n][b] * u[n][b];
    if (cost.beta2 != 0.0)
      for (int i = 0; i < mesh.node_count; ++i) {
        double d = state.mu[n][i] - cost.mu_target[n][i];
        out.tracking += 0.5 * cost.beta2 * dt * mesh.domain_weights[i] * d * d;
      }
  }
  return out;
}

}  // namespace pfc
