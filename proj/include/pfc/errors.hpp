// errors.hpp
// Error hierarchy shared by the solver, optimizer, and IO layers.
#pragma once

#include <stdexcept>
#include <string>

namespace pfc {

// Base for everything a numerical run can throw (maps to CLI exit code 1).
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Newton exceeded max_iter; carries the last residual.
struct NonConvergence : SolverError {
  double last_residual;
  int step;
  NonConvergence(int step_, int iters, double resid)
      : SolverError("Newton did not converge at step " + std::to_string(step_) +
                    " after " + std::to_string(iters) +
                    " iterations (residual " + std::to_string(resid) + ")"),
        last_residual(resid), step(step_) {}
};

// A damped Newton iterate could not be kept inside (0,1) at damping_min.
struct BarrierBreach : SolverError {
  int step;
  explicit BarrierBreach(int step_)
      : SolverError("rho iterate left the (0,1) barrier at step " +
                    std::to_string(step_) + " even at minimal damping"),
        step(step_) {}
};

// Nonpositive diagonal in the mu system; the time step is too large.
struct DiagonalLoss : SolverError {
  int step;
  double worst;
  DiagonalLoss(int step_, double worst_)
      : SolverError("mu-system diagonal coefficient " + std::to_string(worst_) +
                    " <= 0 at step " + std::to_string(step_) +
                    "; time step too large"),
        step(step_), worst(worst_) {}
};

struct SingularJacobian : SolverError {
  using SolverError::SolverError;
};

// Admissible-set projection failed to satisfy both constraints.
struct ProjectionStall : SolverError {
  double box_violation;
  double rate_violation;
  ProjectionStall(double box, double rate)
      : SolverError("projection onto the admissible set stalled (box residual " +
                    std::to_string(box) + ", rate residual " +
                    std::to_string(rate) + ")"),
        box_violation(box), rate_violation(rate) {}
};

struct LineSearchFail : SolverError {
  using SolverError::SolverError;
};

// Potential evaluated outside [guard, 1-guard]; signals a solver bug.
struct PotentialDomain : SolverError {
  double value;
  explicit PotentialDomain(double rho)
      : SolverError("potential evaluated at rho = " + std::to_string(rho) +
                    ", outside the barrier-guarded interval"),
        value(rho) {}
};

// Configuration / IO errors (map to CLI exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : ConfigError {
  int line;
  ParseError(int line_, const std::string& msg)
      : ConfigError("line " + std::to_string(line_) + ": " + msg), line(line_) {}
};

struct ValidationError : ConfigError {
  std::string key;
  ValidationError(const std::string& key_, const std::string& constraint)
      : ConfigError(key_ + ": " + constraint), key(key_) {}
};

struct IoError : ConfigError {
  using ConfigError::ConfigError;
};

struct ShapeMismatch : ConfigError {
  long expected, found;
  ShapeMismatch(const std::string& what, long expected_, long found_)
      : ConfigError(what + ": expected " + std::to_string(expected_) +
                    " entries, found " + std::to_string(found_)),
        expected(expected_), found(found_) {}
};

}  // namespace pfc
