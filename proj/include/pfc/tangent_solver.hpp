// tangent_solver.hpp
// Exact discrete tangent of the forward map u -> (rho, mu): each step solves
// the derivative of the corresponding forward step (the Newton Jacobian for
// the rho update, the mu system with its coefficient sensitivities), so the
// tangent is the algebraic derivative of the scheme rather than a separate
// discretization of the linearized PDE system.
#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "pfc/state_solver.hpp"

namespace pfc {

struct TangentSolution {
  Trajectory xi;   // perturbation of rho, xi^0 = 0
  Trajectory eta;  // perturbation of mu, eta^0 = 0
  BoundaryTrajectory direction;
};

inline TangentSolution solve_tangent(const SpatialMesh& mesh, const ModelParams& params,
                                     const PotentialSpec& spec, const StateSolution& state,
                                     const BoundaryTrajectory& h) {
  const int nn = mesh.node_count;
  const int N = state.steps;
  const double dt = state.dt;
  const int k = state.delay_k;
  if (h.steps() != N)
    throw ShapeMismatch("tangent direction steps", N, h.steps());

  TangentSolution out;
  out.xi = Trajectory(N, nn);
  out.eta = Trajectory(N, nn);
  out.direction = h;

  Eigen::SparseMatrix<double> KB = detail::robin_stiffness(mesh, params.alpha);

  for (int n = 0; n < N; ++n) {
    const Field& rho_next = state.rho[n + 1];
    const Field& rho_n = state.rho[n];
    const Field& mu_next = state.mu[n + 1];
    const Field& mu_n = state.mu[n];
    const Field& eta_del = delay_lookup(out.eta, n, k, out.eta[0]);

    // Derivative of the implicit rho step: the converged Newton Jacobian.
    Eigen::VectorXd diag(nn), rhs(nn);
    for (int i = 0; i < nn; ++i) {
      diag[i] = mesh.domain_weights[i] * (params.delta / dt + f_second(spec, rho_next[i]));
      rhs[i] = mesh.domain_weights[i] *
               (params.delta / dt * out.xi[n][i] + eta_del[i]);
    }
    Eigen::SparseMatrix<double> J = detail::plus_diagonal(mesh, mesh.stiffness, diag);
    Eigen::VectorXd xi_next = detail::solve_sparse(J, rhs, "tangent rho step");

    // Derivative of the mu step, including the sensitivity of its
    // coefficients to rho^{n+1} and rho^n.
    for (int i = 0; i < nn; ++i) {
      diag[i] = mesh.domain_weights[i] *
                (params.epsilon + 3.0 * rho_next[i] - rho_n[i]) / dt;
      rhs[i] = mesh.domain_weights[i] *
               ((params.epsilon + 2.0 * rho_next[i]) / dt * out.eta[n][i] -
                (3.0 * mu_next[i] - 2.0 * mu_n[i]) / dt * xi_next[i] +
                mu_next[i] / dt * out.xi[n][i]);
    }
    for (std::size_t b = 0; b < mesh.boundary_nodes.size(); ++b)
      rhs[mesh.boundary_nodes[b]] += mesh.boundary_weights[b] * params.alpha[b] * h[n + 1][b];
    Eigen::SparseMatrix<double> L = detail::plus_diagonal(mesh, KB, diag);
    Eigen::VectorXd eta_next = detail::solve_sparse(L, rhs, "tangent mu step");

    for (int i = 0; i < nn; ++i) {
      out.xi[n + 1][i] = xi_next[i];
      out.eta[n + 1][i] = eta_next[i];
    }
  }
  return out;
}

// Discrete Y-norm: max-in-time L2 plus L2-in-time H1, for each component.
inline double y_norm(const SpatialMesh& mesh, const Trajectory& a, const Trajectory& b,
                     double dt) {
  double max_a = 0.0, max_b = 0.0, int_a = 0.0, int_b = 0.0;
  for (int n = 0; n <= a.steps(); ++n) {
    max_a = std::max(max_a, l2_norm(mesh, a[n]));
    max_b = std::max(max_b, l2_norm(mesh, b[n]));
    if (n >= 1) {
      double ha = h1_norm(mesh, a[n]), hb = h1_norm(mesh, b[n]);
      int_a += dt * ha * ha;
      int_b += dt * hb * hb;
    }
  }
  return max_a + std::sqrt(int_a) + max_b + std::sqrt(int_b);
}

struct TaylorRow {
  double epsilon;
  double remainder;
  double order;  // NaN on the first row
};

// Remainder test for Frechet differentiability: the Y-norm of
// S(u + eps h) - S(u) - eps * DS(u) h should shrink like eps^2.
inline std::vector<TaylorRow> taylor_remainder_test(
    const SpatialMesh& mesh, const ModelParams& params, const PotentialSpec& spec,
    const InitialData& init, const BoundaryControl& u, const BoundaryTrajectory& h,
    const std::vector<double>& scales) {
  StateSolution base = solve_state(mesh, params, spec, init, u);
  BoundaryTrajectory h_eff = h;
  if (h.steps() != base.steps)
    h_eff = refine_in_time(h, base.steps / h.steps());
  TangentSolution tan = solve_tangent(mesh, params, spec, base, h_eff);

  std::vector<TaylorRow> rows;
  for (double eps : scales) {
    BoundaryControl pert;
    pert.u = u.u;
    for (int n = 0; n <= u.u.steps(); ++n)
      for (std::size_t b = 0; b < pert.u[n].size(); ++b)
        pert.u[n][b] += eps * h[n][b];
    StateSolution sol = solve_state(mesh, params, spec, init, pert);
    if (sol.steps != base.steps)
      throw SolverError("remainder comparison requires matching step grids");

    Trajectory y(base.steps, mesh.node_count), z(base.steps, mesh.node_count);
    for (int n = 0; n <= base.steps; ++n)
      for (int i = 0; i < mesh.node_count; ++i) {
        y[n][i] = sol.rho[n][i] - base.rho[n][i] - eps * tan.xi[n][i];
        z[n][i] = sol.mu[n][i] - base.mu[n][i] - eps * tan.eta[n][i];
      }
    TaylorRow row;
    row.epsilon = eps;
    row.remainder = y_norm(mesh, y, z, base.dt);
    row.order = std::numeric_limits<double>::quiet_NaN();
    if (!rows.empty()) {
      const TaylorRow& prev = rows.back();
      row.order = std::log(prev.remainder / row.remainder) / std::log(prev.epsilon / eps);
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace pfc
