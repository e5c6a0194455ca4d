#ifndef NNORTH_DIAGNOSTICS_HPP
#define NNORTH_DIAGNOSTICS_HPP

#include "nnorth/objective.hpp"
#include "nnorth/stiefel.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace nnorth {

/// Error-bound constant for a feasible base point:
///   2.1√n                          if n == r
///   1                              if n > r == 1
///   2.1√r·(1 + 3r(n−r)) / x_min    if n > r > 1, x_min the smallest nonzero entry
/// Throws HypothesisError when n > r > 1 and `xbar` has a zero row
/// (row norm below 1e-8). Use `kappa_unchecked` to evaluate the formula anyway.
double kappa(const Matrix& xbar);
double kappa_unchecked(const Matrix& xbar);

/// Exact distance from `x` to S₊ⁿ'ʳ by enumerating every row-to-column
/// assignment. Requires (r+1)ⁿ <= 1e6.
struct SplusProjection {
  double distance = 0.0;
  Matrix nearest;
};
SplusProjection brute_force_dist_splus(const Matrix& x);

struct ErrorBoundSample {
  Matrix x;
  double dist_splus = 0.0;
  double dist_cone = 0.0;
  double dist_st = 0.0;
  double kappa = 0.0;
  bool holds = false;  // dist_splus <= (kappa + 1)(dist_cone + dist_st)
};

/// Fills every field of a sample at `x` with the given κ.
ErrorBoundSample evaluate_error_bound(const Matrix& x, double kappa_value);

/// Draws `num_samples` points uniformly from the Frobenius ball of radius
/// `delta` around `xbar` and evaluates the local error bound at each.
/// κ is computed from `xbar` (without the zero-row check when
/// `check_hypothesis` is false).
std::vector<ErrorBoundSample> error_bound_sweep(const Matrix& xbar, double delta,
                                                int num_samples, std::uint64_t seed,
                                                bool check_hypothesis = true);

/// CSV with header `dist_splus,dist_cone,dist_st,kappa,holds`, one row per
/// sample, 17 significant digits.
void write_error_bound_csv(std::ostream& os,
                           const std::vector<ErrorBoundSample>& samples);

/// ⟨H, ∇²f(X̄)H⟩ − ⟨HᵀH, X̄ᵀ∇f(X̄)⟩
double sosc_form(const Objective& f, const Matrix& xbar, const Matrix& h);

struct SoscReport {
  int sampled = 0;
  int surviving = 0;       // directions left after the critical-cone filter
  double min_value = 0.0;  // over surviving unit directions
  bool inconclusive = true;  // no direction survived
  bool strictly_positive = false;
};

/// Samples random unit directions in the critical cone at a feasible
/// stationary `xbar` and reports the smallest value of `sosc_form`.
/// Throws PreconditionError when xbar is infeasible or not stationary
/// (residual above 1e-6).
SoscReport sosc_probe(const Objective& f, const StiefelPoint& xbar,
                      int num_dirs, std::uint64_t seed);

}  // namespace nnorth

#endif
