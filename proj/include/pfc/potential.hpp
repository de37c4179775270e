// potential.hpp
// Double-well free energy f = f1 + f2 on (0,1): convex logarithmic part
// f1(r) = c*(r log r + (1-r) log(1-r)) plus a smooth polynomial perturbation
// f2 of degree <= 4, with singularity-safe evaluation of f, f', f'', f'''.
#pragma once

#include <array>
#include <cmath>
#include <cstddef>

#include "pfc/errors.hpp"

namespace pfc {

struct PotentialSpec {
  double c = 1.0;  // logarithmic coefficient, must be > 0
  std::array<double, 5> f2 = {0.0, 0.0, 0.0, 0.0, 0.0};  // polynomial coefficients
  double barrier_guard = 1e-12;

  // Default smooth concave perturbation c2 * r * (1 - r).
  static PotentialSpec logistic(double c, double c2, double guard = 1e-12) {
    PotentialSpec s;
    s.c = c;
    s.f2 = {0.0, c2, -c2, 0.0, 0.0};
    s.barrier_guard = guard;
    validate(s);
    return s;
  }

  static void validate(const PotentialSpec& s) {
    if (!(s.c > 0.0))
      throw ValidationError("potential.c", "must be > 0 (f1 convex)");
    if (!(s.barrier_guard > 0.0) || !(s.barrier_guard < 0.5))
      throw ValidationError("potential.barrier_guard", "must lie in (0, 0.5)");
    for (double a : s.f2)
      if (!std::isfinite(a))
        throw ValidationError("potential.f2", "coefficients must be finite");
  }
};

namespace detail {
inline void guard_check(const PotentialSpec& s, double rho) {
  if (!(rho >= s.barrier_guard) || !(rho <= 1.0 - s.barrier_guard))
    throw PotentialDomain(rho);
}
}  // namespace detail

inline double f_value(const PotentialSpec& s, double rho) {
  detail::guard_check(s, rho);
  double f1 = s.c * (rho * std::log(rho) + (1.0 - rho) * std::log1p(-rho));
  double p = 0.0;
  for (int k = 4; k >= 0; --k) p = p * rho + s.f2[k];
  return f1 + p;
}

inline double f_prime(const PotentialSpec& s, double rho) {
  detail::guard_check(s, rho);
  double f1p = s.c * (std::log(rho) - std::log1p(-rho));
  double p = 0.0;
  for (int k = 4; k >= 1; --k) p = p * rho + k * s.f2[k];
  return f1p + p;
}

inline double f_second(const PotentialSpec& s, double rho) {
  detail::guard_check(s, rho);
  double f1pp = s.c / (rho * (1.0 - rho));
  double p = 2.0 * s.f2[2] + rho * (6.0 * s.f2[3] + rho * 12.0 * s.f2[4]);
  return f1pp + p;
}

inline double f_third(const PotentialSpec& s, double rho) {
  detail::guard_check(s, rho);
  double d = rho * (1.0 - rho);
  double f1ppp = s.c * (2.0 * rho - 1.0) / (d * d);
  double p = 6.0 * s.f2[3] + rho * 24.0 * s.f2[4];
  return f1ppp + p;
}

}  // namespace pfc
