#ifndef NNORTH_STIEFEL_HPP
#define NNORTH_STIEFEL_HPP

#include "nnorth/core.hpp"

namespace nnorth {

/// Tolerance on ‖XᵀX − I‖_F accepted when certifying a point on St(n,r).
inline constexpr double kOrthTolerance = 1e-10;

/// An n×r matrix with orthonormal columns. Instances are only created
/// through the factories below, so every StiefelPoint in circulation has
/// `orth_residual() <= kOrthTolerance`.
class StiefelPoint {
 public:
  /// Certifies `x` as-is. Throws PreconditionError when the residual exceeds
  /// `tol`, DimensionError when the shape is not tall.
  static StiefelPoint certify(Matrix x, double tol = kOrthTolerance);

  /// Q-factor of `x` (positive diagonal of R). Throws RetractionError when
  /// `x` is numerically rank deficient.
  static StiefelPoint orthonormalize(const Matrix& x);

  const Matrix& mat() const noexcept { return mat_; }
  double orth_residual() const noexcept { return residual_; }
  Index rows() const noexcept { return mat_.rows(); }
  Index cols() const noexcept { return mat_.cols(); }

 private:
  StiefelPoint(Matrix x, double residual)
      : mat_(std::move(x)), residual_(residual) {}

  Matrix mat_;
  double residual_;
};

/// A direction in T_X St(n,r) together with its base point.
struct TangentVector {
  StiefelPoint base;
  Matrix dir;
};

/// A_X(H) = XᵀH + HᵀX
Matrix sym_product(const Matrix& x, const Matrix& h);

/// Z − ½X(XᵀZ + ZᵀX); operates on raw matrices for inner loops.
Matrix proj_tangent_raw(const Matrix& x, const Matrix& z);

TangentVector proj_tangent(const StiefelPoint& x, const Matrix& z);

/// grad h(x) = Proj_{T_x M}(∇h(x))
TangentVector riemannian_grad(const StiefelPoint& x, const Matrix& euclid_grad);

/// Q-factor of x + v with diag(R) > 0. `v.dir == 0` returns `x` exactly.
StiefelPoint retract_qr(const StiefelPoint& x, const TangentVector& v);
StiefelPoint retract_qr(const StiefelPoint& x, const Matrix& dir);

/// Polar factor UVᵀ of x + v.
StiefelPoint retract_polar(const StiefelPoint& x, const TangentVector& v);
StiefelPoint retract_polar(const StiefelPoint& x, const Matrix& dir);

/// Singular values of `x` in nonincreasing order.
Vector singular_values(const Matrix& x);

/// √(Σᵢ(σᵢ(X) − 1)²), the Frobenius distance from `x` to St(n,r).
double dist_to_stiefel(const Matrix& x);

}  // namespace nnorth

#endif
