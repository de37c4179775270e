// state_solver.hpp
// Forward solver for the coupled system
//   (eps + 2 rho) mu_t + mu rho_t - Lap mu = 0,   d mu/dn = alpha (u - mu),
//   delta rho_t - Lap rho + f'(rho) = mu,         d rho/dn = 0,
// decoupled by a one-segment time delay: at each step the rho equation is
// solved fully implicitly with the delayed mu, then the mu equation is a
// linear Robin solve with the already-updated rho.
#pragma once

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "pfc/errors.hpp"
#include "pfc/mesh.hpp"
#include "pfc/potential.hpp"
#include "pfc/trajectory.hpp"

namespace pfc {

struct NewtonOpts {
  double tol = 1e-12;
  int max_iter = 50;
  double damping_min = 1e-4;
};

struct ModelParams {
  double epsilon = 1.0;
  double delta = 1.0;
  BoundaryField alpha;   // heat-exchange coefficient, min > 0
  double T = 1.0;
  int steps = 40;        // N, so dt = T/N
  int delay_k = 1;       // tau = k*dt
  NewtonOpts newton;
};

struct InitialData {
  Field rho0;  // strictly inside (0,1)
  Field mu0;   // nonnegative
};

struct BoundaryControl {
  BoundaryTrajectory u;  // values u^n on Gamma_h, n = 0..N, nonnegative
};

struct StateSolution {
  Trajectory rho;
  Trajectory mu;
  std::vector<int> newton_iters;        // per step, size N
  std::vector<double> newton_residual;  // per step
  std::vector<double> energy_residual;  // per step, discrete energy identity
  int steps = 0;        // effective N (doubled on adaptive restarts)
  int delay_k = 1;      // effective k, keeps tau = k*dt fixed
  double dt = 0.0;
  int restarts = 0;
};

inline void validate_params(const SpatialMesh& mesh, const ModelParams& p) {
  if (!(p.epsilon > 0.0)) throw ValidationError("model.epsilon", "must be > 0");
  if (!(p.delta > 0.0)) throw ValidationError("model.delta", "must be > 0");
  if (!(p.T > 0.0)) throw ValidationError("model.T", "must be > 0");
  if (p.steps < 1) throw ValidationError("model.steps", "must be >= 1");
  if (p.delay_k < 1 || p.delay_k > p.steps)
    throw ValidationError("model.delay_k", "must satisfy 1 <= k <= steps");
  if (p.alpha.size() != mesh.boundary_nodes.size())
    throw ShapeMismatch("model.alpha", static_cast<long>(mesh.boundary_nodes.size()),
                        static_cast<long>(p.alpha.size()));
  for (double a : p.alpha.v)
    if (!(a > 0.0)) throw ValidationError("model.alpha", "must be >= alpha0 > 0");
}

inline void validate_initial(const SpatialMesh& mesh, const InitialData& init,
                             const PotentialSpec& spec) {
  if (init.rho0.size() != static_cast<std::size_t>(mesh.node_count) ||
      init.mu0.size() != static_cast<std::size_t>(mesh.node_count))
    throw ShapeMismatch("initial data", mesh.node_count,
                        static_cast<long>(init.rho0.size()));
  for (double r : init.rho0.v)
    if (!(r > spec.barrier_guard) || !(r < 1.0 - spec.barrier_guard))
      throw ValidationError("initial.rho0", "must lie strictly inside (0,1)");
  for (double m : init.mu0.v)
    if (!(m >= 0.0) || !std::isfinite(m))
      throw ValidationError("initial.mu0", "must be finite and >= 0");
}

inline void validate_control(const SpatialMesh& mesh, const BoundaryControl& c, int steps) {
  if (c.u.steps() != steps)
    throw ShapeMismatch("control.u steps", steps, c.u.steps());
  for (const auto& snap : c.u.snaps) {
    if (snap.size() != mesh.boundary_nodes.size())
      throw ShapeMismatch("control.u width", static_cast<long>(mesh.boundary_nodes.size()),
                          static_cast<long>(snap.size()));
    for (double x : snap.v)
      if (!(x >= 0.0) || !std::isfinite(x))
        throw ValidationError("control.u", "must be finite and >= 0");
  }
}

// Discrete translation operator T_tau with tau = k*dt: the source of the
// rho step n -> n+1 is mu^{n+1-k}, falling back to mu0 for t <= tau.
inline const Field& delay_lookup(const Trajectory& mu_history, int n, int k,
                                 const Field& mu0) {
  int idx = n + 1 - k;
  if (idx <= 0) return mu0;
  return mu_history[idx];
}

namespace detail {

inline Eigen::SparseMatrix<double> robin_stiffness(const SpatialMesh& mesh,
                                                   const BoundaryField& alpha) {
  Eigen::SparseMatrix<double> A = mesh.stiffness;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(mesh.boundary_nodes.size());
  for (std::size_t b = 0; b < mesh.boundary_nodes.size(); ++b)
    trip.emplace_back(mesh.boundary_nodes[b], mesh.boundary_nodes[b],
                      mesh.boundary_weights[b] * alpha[b]);
  Eigen::SparseMatrix<double> B(mesh.node_count, mesh.node_count);
  B.setFromTriplets(trip.begin(), trip.end());
  return A + B;
}

inline Eigen::SparseMatrix<double> plus_diagonal(const SpatialMesh& mesh,
                                                 const Eigen::SparseMatrix<double>& A,
                                                 const Eigen::VectorXd& d) {
  Eigen::SparseMatrix<double> D(mesh.node_count, mesh.node_count);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(mesh.node_count);
  for (int i = 0; i < mesh.node_count; ++i) trip.emplace_back(i, i, d[i]);
  D.setFromTriplets(trip.begin(), trip.end());
  return A + D;
}

inline Eigen::VectorXd solve_sparse(const Eigen::SparseMatrix<double>& A,
                                    const Eigen::VectorXd& rhs, const char* what) {
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) throw SingularJacobian(what);
  Eigen::VectorXd x = lu.solve(rhs);
  if (lu.info() != Eigen::Success) throw SingularJacobian(what);
  return x;
}

// Weighted L2 norm of a strong-form residual given in weak (mass-multiplied)
// form: ||M^{-1} F||_{L2,w} = sqrt(sum F_i^2 / w_i).
inline double strong_residual_norm(const SpatialMesh& mesh, const Eigen::VectorXd& F) {
  double s = 0.0;
  for (int i = 0; i < mesh.node_count; ++i) s += F[i] * F[i] / mesh.domain_weights[i];
  return std::sqrt(s);
}

}  // namespace detail

struct StepRhoResult {
  Field rho_next;
  int iters = 0;
  double residual = 0.0;
};

// One fully implicit rho step:
//   delta (r - rho_n)/dt - Lap_h r + f'(r) = mu_del,
// solved by damped Newton; the logarithmic barrier keeps r inside (0,1).
inline StepRhoResult step_rho(const SpatialMesh& mesh, const ModelParams& params,
                              const PotentialSpec& spec, const Field& rho_n,
                              const Field& mu_del, double dt, int step_index = 0) {
  const int nn = mesh.node_count;
  const double guard = spec.barrier_guard;
  Eigen::Map<const Eigen::VectorXd> w(mesh.domain_weights.data(), nn);

  auto weak_residual = [&](const Eigen::VectorXd& r) {
    Eigen::VectorXd F = mesh.stiffness * r;
    for (int i = 0; i < nn; ++i)
      F[i] += mesh.domain_weights[i] *
              (params.delta * (r[i] - rho_n[i]) / dt + f_prime(spec, r[i]) - mu_del[i]);
    return F;
  };

  Eigen::VectorXd r = Eigen::Map<const Eigen::VectorXd>(rho_n.v.data(), nn);
  Eigen::VectorXd F = weak_residual(r);
  double resid = detail::strong_residual_norm(mesh, F);

  int it = 0;
  for (; it < params.newton.max_iter && resid > params.newton.tol; ++it) {
    Eigen::VectorXd diag(nn);
    for (int i = 0; i < nn; ++i)
      diag[i] = mesh.domain_weights[i] * (params.delta / dt + f_second(spec, r[i]));
    Eigen::SparseMatrix<double> J = detail::plus_diagonal(mesh, mesh.stiffness, diag);
    Eigen::VectorXd delta = detail::solve_sparse(J, Eigen::VectorXd(-F), "rho-step Newton");

    // Damp by halving until the iterate stays inside the barrier and the
    // residual decreases; below damping_min, an infeasible iterate is fatal.
    bool any_feasible = false;
    double best_resid = 0.0;
    Eigen::VectorXd best_r, best_F;
    for (double lambda = 1.0; lambda >= params.newton.damping_min; lambda *= 0.5) {
      Eigen::VectorXd cand = r + lambda * delta;
      bool feasible = true;
      for (int i = 0; i < nn; ++i)
        if (!(cand[i] >= guard) || !(cand[i] <= 1.0 - guard)) {
          feasible = false;
          break;
        }
      if (!feasible) continue;
      Eigen::VectorXd Fc = weak_residual(cand);
      double rc = detail::strong_residual_norm(mesh, Fc);
      if (!any_feasible || rc < best_resid) {
        any_feasible = true;
        best_resid = rc;
        best_r = std::move(cand);
        best_F = std::move(Fc);
      }
      if (rc < resid) break;  // sufficient progress
    }
    if (!any_feasible) throw BarrierBreach(step_index);
    r = std::move(best_r);
    F = std::move(best_F);
    resid = best_resid;
  }
  if (resid > params.newton.tol)
    throw NonConvergence(step_index, it, resid);

  StepRhoResult out;
  out.rho_next = Field(nn);
  for (int i = 0; i < nn; ++i) out.rho_next[i] = r[i];
  out.iters = it;
  out.residual = resid;
  return out;
}

// One linear mu step with Robin control boundary condition:
//   [(eps + 2 rho') / dt + (rho' - rho)/dt + A_Robin] mu' = (eps + 2 rho') mu/dt + alpha u'.
// The diagonal coefficient must stay positive (M-matrix property); otherwise
// DiagonalLoss asks the caller to halve the time step.
inline Field step_mu(const SpatialMesh& mesh, const ModelParams& params,
                     const Field& mu_n, const Field& rho_next, const Field& rho_n,
                     const BoundaryField& u_next, double dt, int step_index = 0) {
  const int nn = mesh.node_count;
  Eigen::VectorXd diag(nn), rhs(nn);
  double worst = 1e300;
  for (int i = 0; i < nn; ++i) {
    double coef = (params.epsilon + 3.0 * rho_next[i] - rho_n[i]) / dt;
    worst = std::min(worst, coef);
    diag[i] = mesh.domain_weights[i] * coef;
    rhs[i] = mesh.domain_weights[i] * (params.epsilon + 2.0 * rho_next[i]) / dt * mu_n[i];
  }
  if (worst <= 0.0) throw DiagonalLoss(step_index, worst);
  for (std::size_t b = 0; b < mesh.boundary_nodes.size(); ++b)
    rhs[mesh.boundary_nodes[b]] += mesh.boundary_weights[b] * params.alpha[b] * u_next[b];

  Eigen::SparseMatrix<double> L =
      detail::plus_diagonal(mesh, detail::robin_stiffness(mesh, params.alpha), diag);
  Eigen::VectorXd x = detail::solve_sparse(L, rhs, "mu-step system");

  double rel = (L * x - rhs).norm() / std::max(rhs.norm(), 1e-300);
  if (rel > 1e-10)
    throw SolverError("mu-step direct solve residual " + std::to_string(rel));

  Field out(nn);
  for (int i = 0; i < nn; ++i) out[i] = x[i];
  return out;
}

namespace detail {

inline double energy(const SpatialMesh& mesh, const ModelParams& p, const Field& rho,
                     const Field& mu) {
  double s = 0.0;
  for (int i = 0; i < mesh.node_count; ++i)
    s += mesh.domain_weights[i] * (0.5 * p.epsilon + rho[i]) * mu[i] * mu[i];
  return s;
}

// Residual of the discrete energy identity over one step (testing the mu
// equation by mu^{n+1}); its absolute sum vanishes at rate O(dt).
inline double energy_identity_residual(const SpatialMesh& mesh, const ModelParams& p,
                                       const Field& rho_n, const Field& mu_n,
                                       const Field& rho_next, const Field& mu_next,
                                       const BoundaryField& u_next, double dt) {
  Eigen::Map<const Eigen::VectorXd> m1(mu_next.v.data(), mesh.node_count);
  double quad = m1.dot(mesh.stiffness * m1);
  double robin = 0.0, load = 0.0;
  for (std::size_t b = 0; b < mesh.boundary_nodes.size(); ++b) {
    int node = mesh.boundary_nodes[b];
    robin += mesh.boundary_weights[b] * p.alpha[b] * mu_next[node] * mu_next[node];
    load += mesh.boundary_weights[b] * p.alpha[b] * u_next[b] * mu_next[node];
  }
  return energy(mesh, p, rho_next, mu_next) - energy(mesh, p, rho_n, mu_n) +
         dt * (quad + robin - load);
}

}  // namespace detail

// Full forward solve. On DiagonalLoss (and on Newton failures) the whole
// solve restarts with N and k doubled, up to 4 times, preserving tau = k*dt.
inline StateSolution solve_state(const SpatialMesh& mesh, const ModelParams& params,
                                 const PotentialSpec& spec, const InitialData& init,
                                 const BoundaryControl& control) {
  validate_params(mesh, params);
  PotentialSpec::validate(spec);
  validate_initial(mesh, init, spec);
  validate_control(mesh, control, params.steps);

  const int max_restarts = 4;
  for (int attempt = 0;; ++attempt) {
    int factor = 1 << attempt;
    int n_eff = params.steps * factor;
    int k_eff = params.delay_k * factor;
    double dt = params.T / n_eff;
    BoundaryTrajectory u_eff =
        (factor == 1) ? control.u : refine_in_time(control.u, factor);

    StateSolution sol;
    sol.steps = n_eff;
    sol.delay_k = k_eff;
    sol.dt = dt;
    sol.restarts = attempt;
    sol.rho = Trajectory(n_eff, mesh.node_count);
    sol.mu = Trajectory(n_eff, mesh.node_count);
    sol.rho[0] = init.rho0;
    sol.mu[0] = init.mu0;
    sol.newton_iters.assign(n_eff, 0);
    sol.newton_residual.assign(n_eff, 0.0);
    sol.energy_residual.assign(n_eff, 0.0);

    try {
      for (int n = 0; n < n_eff; ++n) {
        const Field& mu_del = delay_lookup(sol.mu, n, k_eff, init.mu0);
        StepRhoResult rs = step_rho(mesh, params, spec, sol.rho[n], mu_del, dt, n);
        Field mu_next =
            step_mu(mesh, params, sol.mu[n], rs.rho_next, sol.rho[n], u_eff[n + 1], dt, n);
        sol.energy_residual[n] = detail::energy_identity_residual(
            mesh, params, sol.rho[n], sol.mu[n], rs.rho_next, mu_next, u_eff[n + 1], dt);
        sol.newton_iters[n] = rs.iters;
        sol.newton_residual[n] = rs.residual;
        sol.rho[n + 1] = std::move(rs.rho_next);
        sol.mu[n + 1] = std::move(mu_next);
      }
    } catch (const DiagonalLoss&) {
      if (attempt >= max_restarts) throw;
      continue;
    } catch (const NonConvergence&) {
      if (attempt >= max_restarts) throw;
      continue;
    } catch (const BarrierBreach&) {
      if (attempt >= max_restarts) throw;
      continue;
    }
    return sol;
  }
}

}  // namespace pfc
