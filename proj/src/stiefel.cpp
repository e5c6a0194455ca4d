#include "nnorth/stiefel.hpp"

#include <cmath>
#include <sstream>

namespace nnorth {

void require_same_shape(const Matrix& a, const Matrix& b, const char* where) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    std::ostringstream os;
    os << where << ": shape mismatch " << a.rows() << "x" << a.cols()
       << " vs " << b.rows() << "x" << b.cols();
    throw DimensionError(os.str());
  }
}

void require_valid_dense(const Matrix& x, const char* where) {
  if (x.cols() < 1 || x.rows() < x.cols()) {
    std::ostringstream os;
    os << where << ": expected rows >= cols >= 1, got " << x.rows() << "x"
       << x.cols();
    throw DimensionError(os.str());
  }
  if (!x.allFinite()) {
    throw InputError(std::string(where) + ": non-finite entry");
  }
}

double orth_residual(const Matrix& x) {
  const Index r = x.cols();
  return (x.transpose() * x - Matrix::Identity(r, r)).norm();
}

StiefelPoint StiefelPoint::certify(Matrix x, double tol) {
  require_valid_dense(x, "StiefelPoint::certify");
  const double res = nnorth::orth_residual(x);
  if (!(res <= tol)) {
    std::ostringstream os;
    os << "StiefelPoint::certify: orthogonality residual " << res
       << " exceeds " << tol;
    throw PreconditionError(os.str());
  }
  return StiefelPoint(std::move(x), res);
}

namespace {

// Thin Q-factor with positive diagonal of R.
Matrix positive_qr(const Matrix& y) {
  const Index n = y.rows();
  const Index r = y.cols();
  Eigen::HouseholderQR<Matrix> qr(y);
  Matrix q = qr.householderQ() * Matrix::Identity(n, r);
  const auto& packed = qr.matrixQR();
  const double scale = std::max(1.0, y.norm());
  for (Index j = 0; j < r; ++j) {
    const double rjj = packed(j, j);
    if (!(std::abs(rjj) > 1e-12 * scale)) {
      throw RetractionError("QR retraction: matrix is rank deficient");
    }
    if (rjj < 0) q.col(j) *= -1.0;
  }
  return q;
}

}  // namespace

StiefelPoint StiefelPoint::orthonormalize(const Matrix& x) {
  require_valid_dense(x, "StiefelPoint::orthonormalize");
  Matrix q = positive_qr(x);
  const double res = nnorth::orth_residual(q);
  return StiefelPoint(std::move(q), res);
}

Matrix sym_product(const Matrix& x, const Matrix& h) {
  Matrix xth = x.transpose() * h;
  return xth + xth.transpose();
}

Matrix proj_tangent_raw(const Matrix& x, const Matrix& z) {
  require_same_shape(x, z, "proj_tangent");
  return z - 0.5 * x * sym_product(x, z);
}

TangentVector proj_tangent(const StiefelPoint& x, const Matrix& z) {
  return TangentVector{x, proj_tangent_raw(x.mat(), z)};
}

TangentVector riemannian_grad(const StiefelPoint& x, const Matrix& euclid_grad) {
  return proj_tangent(x, euclid_grad);
}

StiefelPoint retract_qr(const StiefelPoint& x, const Matrix& dir) {
  require_same_shape(x.mat(), dir, "retract_qr");
  if (dir.isZero(0.0)) return x;
  return StiefelPoint::orthonormalize(x.mat() + dir);
}

StiefelPoint retract_qr(const StiefelPoint& x, const TangentVector& v) {
  return retract_qr(x, v.dir);
}

StiefelPoint retract_polar(const StiefelPoint& x, const Matrix& dir) {
  require_same_shape(x.mat(), dir, "retract_polar");
  if (dir.isZero(0.0)) return x;
  const Matrix y = x.mat() + dir;
  Eigen::JacobiSVD<Matrix> svd(y, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  if (!(s(s.size() - 1) > 1e-12 * std::max(1.0, s(0)))) {
    throw RetractionError("polar retraction: matrix is rank deficient");
  }
  return StiefelPoint::certify(svd.matrixU() * svd.matrixV().transpose());
}

StiefelPoint retract_polar(const StiefelPoint& x, const TangentVector& v) {
  return retract_polar(x, v.dir);
}

Vector singular_values(const Matrix& x) {
  Eigen::JacobiSVD<Matrix> svd(x);
  return svd.singularValues();
}

double dist_to_stiefel(const Matrix& x) {
  const Vector s = singular_values(x);
  return (s.array() - 1.0).matrix().norm();
}

}  // namespace nnorth
