#ifndef NNORTH_PENALTY_HPP
#define NNORTH_PENALTY_HPP

#include "nnorth/objective.hpp"

#include <utility>

namespace nnorth {

/// ρ and γ of Θ_{ρ,γ}(X) = f(X) + ρ·e_γϑ(X). `gamma == 0` selects the
/// quadratic penalty f(X) + ρ‖max(0,−X)‖²_F.
struct PenaltyParams {
  double rho = 1.0;
  double gamma = 0.05;

  void validate() const;
};

/// ϑ(X) = ⟨E, max(0,−X)⟩, the ℓ1 distance of X to the nonnegative orthant.
double vartheta(const Matrix& x);

/// Proximal map of γϑ: entrywise min(X + γ, max(X, 0)).
Matrix prox_vartheta(const Matrix& x, double gamma);

/// Moreau envelope e_γϑ(X).
double moreau_env_vartheta(const Matrix& x, double gamma);

/// ∇e_γϑ(X) = γ⁻¹(X − prox_vartheta(X, γ)).
Matrix grad_moreau(const Matrix& x, double gamma);

/// ‖max(0,−X)‖²_F
double quad_penalty(const Matrix& x);
Matrix grad_quad_penalty(const Matrix& x);

/// Penalty term ρ·e_γϑ or ρ·‖max(0,−X)‖²_F and its gradient.
std::pair<double, Matrix> penalty_value_grad(const Matrix& x,
                                             const PenaltyParams& p);
double penalty_value(const Matrix& x, const PenaltyParams& p);

/// Θ_{ρ,γ}(X) and its Euclidean gradient.
std::pair<double, Matrix> theta_value_grad(const Objective& f, const Matrix& x,
                                           const PenaltyParams& p);
double theta_value(const Objective& f, const Matrix& x, const PenaltyParams& p);

/// Θ_{ρ,γ} packaged as an Objective so the inner solver can minimize it.
/// Holds a reference to `f`; the caller keeps `f` alive.
class PenalizedObjective final : public Objective {
 public:
  PenalizedObjective(const Objective& f, PenaltyParams p);

  Index rows() const override { return f_.rows(); }
  Index cols() const override { return f_.cols(); }
  double value(const Matrix& x) const override;
  Matrix gradient(const Matrix& x) const override;
  void value_grad(const Matrix& x, double& v, Matrix& g) const override;

  const PenaltyParams& params() const noexcept { return p_; }

 private:
  const Objective& f_;
  PenaltyParams p_;
};

}  // namespace nnorth

#endif
