#ifndef NNORTH_OBJECTIVE_HPP
#define NNORTH_OBJECTIVE_HPP

#include "nnorth/core.hpp"

namespace nnorth {

/// A smooth function on ℝⁿˣʳ. Implementations must be pure: the same input
/// gives the same output and concurrent calls are safe.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual Index rows() const = 0;
  virtual Index cols() const = 0;

  virtual double value(const Matrix& x) const = 0;
  virtual Matrix gradient(const Matrix& x) const = 0;

  /// Combined evaluation; override when value and gradient share work.
  virtual void value_grad(const Matrix& x, double& value_out,
                          Matrix& grad_out) const {
    value_out = value(x);
    grad_out = gradient(x);
  }

  /// ∇²f(x)[h]. The default is a forward difference of the gradient with
  /// step 1e-5·(1 + ‖x‖_F)/‖h‖_F.
  virtual Matrix hessian_vec(const Matrix& x, const Matrix& h) const;

  /// Throws DimensionError when `x` is not rows()×cols().
  void check_shape(const Matrix& x, const char* where) const;
};

}  // namespace nnorth

#endif
