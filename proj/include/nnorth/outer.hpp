#ifndef NNORTH_OUTER_HPP
#define NNORTH_OUTER_HPP

#include "nnorth/penalty.hpp"
#include "nnorth/pgm.hpp"

#include <optional>
#include <vector>

namespace nnorth {

/// Parameters of the penalty driver. Use `seppg_plus()` / `seppg_zero()` for
/// the Moreau-envelope and quadratic-penalty presets.
struct PenaltyConfig {
  double gamma = 0.05;
  /// Initial penalty weight. Unset means c0·|f(X⁰)|/ϑ(X⁰) (or 1 when
  /// ϑ(X⁰) = 0 or the rule yields 0).
  std::optional<double> rho0;
  double c0 = 0.1;
  double rho_max = 1e10;
  double sigma_rho_small = 1.05;  // used while rho_l <= 1
  double sigma_rho_large = 1.1;
  double tau0 = 1.0;
  double tau_min = 1e-5;
  double sigma_tau = 0.95;
  double epsilon = 1e-6;
  int l_max = 2000;
  /// Rounded warm starts are considered only once rho_l reaches this value.
  double rho_feas_threshold = 1e3;
  PgmConfig pgm;

  static PenaltyConfig seppg_plus();
  static PenaltyConfig seppg_zero();

  void validate() const;
};

struct OuterRecord {
  double rho = 0.0;
  double tau = 0.0;
  double ninf = 0.0;       // ϑ(X^{l+1})
  double f = 0.0;          // f(X^{l+1})
  double upsilon = 0.0;    // υ^l the inner solve was bounded by
  double theta = 0.0;      // Θ_{ρ_l,γ}(X^{l+1})
  double grad_norm = 0.0;  // ‖Proj_T ∇Θ_{ρ_l,γ}(X^{l+1})‖_F
  int inner_iters = 0;
  bool rounded_start = false;  // next subproblem warm-started from rounding
  PgmStatus inner_status = PgmStatus::kConverged;
};

enum class StopReason {
  kFeasible,        // ϑ <= ε
  kStagnated,       // ϑ <= 5ε and relative f change over 9 outer steps <= 1e-8
  kOuterLimit,
  kInnerFailure,
};
std::string_view to_string(StopReason r);

struct SolveReport {
  StiefelPoint x_final;
  double f_final = 0.0;
  double ninf = 0.0;
  double orth_residual = 0.0;
  double stationarity = 0.0;
  int outer_iters = 0;
  int inner_iters_total = 0;
  double wall_time = 0.0;
  StopReason stop = StopReason::kOuterLimit;
  /// Set when some subproblem missed its tolerance or the υ bound.
  bool inner_flagged = false;
  std::vector<OuterRecord> trace;
  /// Inner traces, one per subproblem, in order.
  std::vector<PgmTrace> inner_traces;
  /// Inner configs matching `inner_traces` (the grad_tol varies).
  std::vector<PgmConfig> inner_configs;
};

/// Builds a point of S₊ⁿ'ʳ from `x`: rows go to their argmax column, kept
/// entries are clamped at zero and columns normalized. Columns left without
/// positive mass take over the row with the largest entry among columns that
/// hold at least two rows. For n == r the result is the permutation matrix
/// obtained by greedy crossing-out of the largest remaining entry.
StiefelPoint round_to_feasible(const Matrix& x);

/// True when x ∈ S₊ⁿ'ʳ up to `tol` (nonnegative, orthonormal, at most one
/// nonzero per row).
bool is_nonneg_orthogonal(const Matrix& x, double tol = 1e-12);

/// Exact-penalty method: minimizes f over S₊ⁿ'ʳ by a sequence of
/// Θ_{ρ,γ} subproblems on St(n,r).
SolveReport seppg_solve(const Objective& f, const StiefelPoint& x0,
                        const PenaltyConfig& cfg);

struct AlmConfig {
  PgmConfig pgm;  // grad_tol defaults to 1e-6 for the subproblems
  double growth = 1.2;
  double epsilon = 1e-6;
  int max_outer = 1000;
};

/// L_μ(X,Λ) = f(X) + (μ/2)‖min(0, X − Λ/μ)‖²_F − ‖Λ‖²_F/(2μ).
class AugmentedLagrangian final : public Objective {
 public:
  AugmentedLagrangian(const Objective& f, Matrix multiplier, double mu);

  Index rows() const override { return f_.rows(); }
  Index cols() const override { return f_.cols(); }
  double value(const Matrix& x) const override;
  Matrix gradient(const Matrix& x) const override;
  void value_grad(const Matrix& x, double& v, Matrix& g) const override;

 private:
  const Objective& f_;
  Matrix lambda_;
  double mu_;
};

/// Augmented Lagrangian baseline with Λ⁰ = 0, Λ ← max(Λ − μX, 0), μ ← 1.2μ.
SolveReport alm_solve(const Objective& f, const StiefelPoint& x0, double mu0,
                      const AlmConfig& cfg = {});

/// min over G in the normal cone of ℝ₊ⁿˣʳ at x of ‖Proj_{T_x M}(∇f(x) + G)‖_F.
/// Entries below 1e-8 count as zero. Requires ϑ(x) <= 5e-6.
double stationarity_residual(const Objective& f, const StiefelPoint& x);

}  // namespace nnorth

#endif
