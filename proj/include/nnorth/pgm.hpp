#ifndef NNORTH_PGM_HPP
#define NNORTH_PGM_HPP

#include "nnorth/objective.hpp"
#include "nnorth/stiefel.hpp"

#include <string_view>
#include <vector>

namespace nnorth {

/// Tunables of the nonmonotone line-search proximal gradient method on
/// St(n,r). Defaults are the values used for all benchmarks.
struct PgmConfig {
  double eta = 0.1;      // backtracking shrink factor, in (0,1)
  double alpha = 1e-4;   // sufficient-decrease constant
  int memory = 5;        // nonmonotone window: compare against last memory+1 values
  double t_min = 1e-12;
  double t_max = 1e12;
  double grad_tol = 1e-6;
  int max_iters = 5000;
  int max_backtracks = 50;

  void validate() const;
};

/// Clamped Barzilai–Borwein step
///   max{min{‖ΔX‖²/|⟨ΔX,ΔY⟩|, |⟨ΔX,ΔY⟩|/‖ΔY‖², t_max}, t_min}.
/// A vanishing ‖ΔY‖ or |⟨ΔX,ΔY⟩| < 1e-16‖ΔX‖‖ΔY‖ returns clamp(fallback).
double bb_stepsize(const Matrix& dx, const Matrix& dy, double t_min,
                   double t_max, double fallback);

struct PgmIterRecord {
  double value = 0.0;       // Θ(X^{k+1})
  double window_max = 0.0;  // max Θ over the window the step was tested against
  double v_norm = 0.0;      // ‖V^k‖_F
  double t = 0.0;           // accepted step
  double grad_norm = 0.0;   // ‖grad Θ(X^{k+1})‖_F
  int backtracks = 0;
};

struct PgmTrace {
  double initial_value = 0.0;
  double initial_grad_norm = 0.0;
  double first_t = 0.0;
  std::vector<PgmIterRecord> iters;

  /// Θ(X^{ℓ(k)}) for k = 0..K, the max over each sliding window. Entry 0 is
  /// Θ(X⁰).
  std::vector<double> window_max_sequence(int memory) const;

  /// √(Θ(X^{ℓ(k+1)}) − Θ(X^{k+1})), the summands of the nonmonotonicity
  /// series; recorded for inspection only.
  std::vector<double> nonmonotone_summands(int memory) const;
};

enum class PgmStatus { kConverged, kMaxIters, kLineSearchFailed };
std::string_view to_string(PgmStatus s);

struct PgmStepResult {
  StiefelPoint x;
  Matrix v;
  double t = 0.0;
  double value = 0.0;
  int backtracks = 0;
};

/// One iteration of the nonmonotone line search starting from `t_init`.
/// `rgrad` is the Riemannian gradient at `x`; the step is accepted once
/// Θ(X⁺) <= window_max − (α/2t)‖V‖²_F. Throws LineSearchError after
/// `cfg.max_backtracks` reductions.
PgmStepResult pgm_step(const Objective& obj, const StiefelPoint& x,
                       const Matrix& rgrad, double t_init, double window_max,
                       const PgmConfig& cfg);

struct PgmResult {
  StiefelPoint x;
  double value = 0.0;
  double grad_norm = 0.0;  // ‖grad Θ(x)‖_F at the returned point
  PgmStatus status = PgmStatus::kConverged;
  std::string message;
  PgmTrace trace;

  int iterations() const { return static_cast<int>(trace.iters.size()); }
};

/// Minimizes `obj` over St(n,r) from `x0`. Returns the first iterate with
/// ‖grad‖_F <= cfg.grad_tol. After cfg.max_iters the lowest-value iterate of
/// the final window is returned with status kMaxIters. A failed line search
/// stops the solve and returns the last accepted iterate with status
/// kLineSearchFailed.
PgmResult pgm_solve(const Objective& obj, const StiefelPoint& x0,
                    const PgmConfig& cfg);

}  // namespace nnorth

#endif
