#ifndef NNORTH_PROBLEMS_HPP
#define NNORTH_PROBLEMS_HPP

#include "nnorth/outer.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nnorth {

struct QapInstance {
  std::string name;
  Index n = 0;
  Matrix a;
  Matrix b;
  std::optional<double> best_known;

  void validate() const;
};

/// Lifted QAP objective ⟨A, WBWᵀ⟩ with W = X∘X.
class QapObjective final : public Objective {
 public:
  explicit QapObjective(QapInstance inst);

  Index rows() const override { return inst_.n; }
  Index cols() const override { return inst_.n; }
  double value(const Matrix& x) const override;
  /// 2·X ∘ (A W Bᵀ + Aᵀ W B)
  Matrix gradient(const Matrix& x) const override;
  void value_grad(const Matrix& x, double& v, Matrix& g) const override;

  /// ⟨A, PBPᵀ⟩ for a permutation (or any) matrix P, without lifting.
  double classical_value(const Matrix& p) const;
  const QapInstance& instance() const noexcept { return inst_; }

 private:
  QapInstance inst_;
};

struct AffinityInstance {
  std::string name;
  Index n = 0;
  Matrix k;  // n²×n², symmetrized on construction

  /// Symmetrizes `k` as (K + Kᵀ)/2. Throws DimensionError unless K is n²×n².
  static AffinityInstance from_matrix(Matrix k, std::string name = {});
};

/// Graph matching written as minimization: −vec(X)ᵀ K vec(X), vec stacking
/// columns.
class GraphMatchingObjective final : public Objective {
 public:
  explicit GraphMatchingObjective(AffinityInstance inst);

  Index rows() const override { return inst_.n; }
  Index cols() const override { return inst_.n; }
  double value(const Matrix& x) const override;
  Matrix gradient(const Matrix& x) const override;
  void value_grad(const Matrix& x, double& v, Matrix& g) const override;

 private:
  AffinityInstance inst_;
};

/// ‖X − C‖²_F
class ProjectionObjective final : public Objective {
 public:
  explicit ProjectionObjective(Matrix c);

  Index rows() const override { return c_.rows(); }
  Index cols() const override { return c_.cols(); }
  double value(const Matrix& x) const override;
  Matrix gradient(const Matrix& x) const override;
  Matrix hessian_vec(const Matrix& x, const Matrix& h) const override;

  const Matrix& target() const noexcept { return c_; }

 private:
  Matrix c_;
};

/// ‖A − XYᵀ‖²_F as a function of X for fixed Y, evaluated as
/// ‖A‖² − 2⟨AY, X⟩ + ⟨XᵀX, YᵀY⟩.
class OnmfObjective final : public Objective {
 public:
  OnmfObjective(const Matrix& a, const Matrix& y);

  Index rows() const override { return ay_.rows(); }
  Index cols() const override { return ay_.cols(); }
  double value(const Matrix& x) const override;
  Matrix gradient(const Matrix& x) const override;
  void value_grad(const Matrix& x, double& v, Matrix& g) const override;

 private:
  double a_sq_;
  Matrix ay_;
  Matrix yty_;
};

struct OnmfInstance {
  Matrix a;  // n×p, nonnegative
  Index r = 0;

  void validate() const;
};

enum class SolverKind { kSeppgPlus, kSeppgZero, kAlm };
std::string_view to_string(SolverKind k);
SolverKind parse_solver_kind(std::string_view s);

struct OnmfConfig {
  SolverKind solver = SolverKind::kSeppgPlus;
  PenaltyConfig penalty = PenaltyConfig::seppg_plus();
  AlmConfig alm;
  /// Initial ρ (penalty solvers) or μ (ALM); unset means 1/‖A‖_F.
  std::optional<double> weight0;
  int max_alternations = 100;
  double rel_tol = 1e-6;
};

struct OnmfResult {
  StiefelPoint x;
  Matrix y;
  /// ‖A − XYᵀ‖²_F after each alternation.
  std::vector<double> history;
  int inner_iters_total = 0;
};

/// Y-update max(0, AᵀX(XᵀX)⁻¹).
Matrix onmf_update_y(const Matrix& a, const Matrix& x);

/// Alternating minimization: Y-update, then an X-solve over S₊ⁿ'ʳ.
OnmfResult onmf_alternate(const OnmfInstance& inst, const StiefelPoint& x0,
                          const OnmfConfig& cfg);

/// Cluster label of each row of X (argmax over columns, 0-based).
std::vector<int> row_labels(const Matrix& x);

/// Runs the selected solver; `weight0` overrides ρ₀ or μ₀.
SolveReport run_solver(SolverKind kind, const Objective& f,
                       const StiefelPoint& x0, const PenaltyConfig& penalty,
                       const AlmConfig& alm, std::optional<double> weight0);

/// Q-factor of a standard Gaussian n×r matrix drawn from `seed`.
StiefelPoint random_stiefel_start(Index n, Index r, std::uint64_t seed);

/// |G|·diag(1/‖G_{·j}‖) for the same Gaussian draw as random_stiefel_start.
/// Orthonormal only when the column supports happen to be disjoint.
Matrix nonneg_start(Index n, Index r, std::uint64_t seed);

/// Standard Gaussian n×r matrix; the common source of both starts.
Matrix gaussian_matrix(Index n, Index r, std::uint64_t seed);

}  // namespace nnorth

#endif
