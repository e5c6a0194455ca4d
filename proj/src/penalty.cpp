#include "nnorth/penalty.hpp"

#include <cmath>
#include <sstream>

namespace nnorth {

void Objective::check_shape(const Matrix& x, const char* where) const {
  if (x.rows() != rows() || x.cols() != cols()) {
    std::ostringstream os;
    os << where << ": expected " << rows() << "x" << cols() << ", got "
       << x.rows() << "x" << x.cols();
    throw DimensionError(os.str());
  }
}

Matrix Objective::hessian_vec(const Matrix& x, const Matrix& h) const {
  const double hn = h.norm();
  if (hn == 0.0) return Matrix::Zero(x.rows(), x.cols());
  const double step = 1e-5 * (1.0 + x.norm()) / hn;
  return (gradient(x + step * h) - gradient(x)) / step;
}

void PenaltyParams::validate() const {
  // rho == 0 is allowed and reduces Θ to f.
  if (!(rho >= 0.0) || !std::isfinite(rho)) {
    throw ParameterError("penalty weight rho must be finite and >= 0");
  }
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw ParameterError("Moreau parameter gamma must be finite and >= 0");
  }
}

namespace {

void require_positive_gamma(double gamma, const char* where) {
  if (!(gamma > 0.0)) {
    throw ParameterError(std::string(where) + ": gamma must be > 0");
  }
}

}  // namespace

double vartheta(const Matrix& x) { return (-x.array()).max(0.0).sum(); }

Matrix prox_vartheta(const Matrix& x, double gamma) {
  require_positive_gamma(gamma, "prox_vartheta");
  return (x.array() + gamma).min(x.array().max(0.0)).matrix();
}

double moreau_env_vartheta(const Matrix& x, double gamma) {
  require_positive_gamma(gamma, "moreau_env_vartheta");
  double sum = 0.0;
  for (Index j = 0; j < x.cols(); ++j) {
    for (Index i = 0; i < x.rows(); ++i) {
      const double v = x(i, j);
      if (v >= 0.0) continue;
      if (v >= -gamma) {
        sum += v * v / (2.0 * gamma);
      } else {
        sum += -v - 0.5 * gamma;
      }
    }
  }
  return sum;
}

Matrix grad_moreau(const Matrix& x, double gamma) {
  return (x - prox_vartheta(x, gamma)) / gamma;
}

double quad_penalty(const Matrix& x) {
  return x.array().min(0.0).square().sum();
}

Matrix grad_quad_penalty(const Matrix& x) {
  return (2.0 * x.array().min(0.0)).matrix();
}

std::pair<double, Matrix> penalty_value_grad(const Matrix& x,
                                             const PenaltyParams& p) {
  if (p.gamma > 0.0) {
    return {p.rho * moreau_env_vartheta(x, p.gamma),
            p.rho * grad_moreau(x, p.gamma)};
  }
  return {p.rho * quad_penalty(x), p.rho * grad_quad_penalty(x)};
}

double penalty_value(const Matrix& x, const PenaltyParams& p) {
  return p.gamma > 0.0 ? p.rho * moreau_env_vartheta(x, p.gamma)
                       : p.rho * quad_penalty(x);
}

std::pair<double, Matrix> theta_value_grad(const Objective& f, const Matrix& x,
                                           const PenaltyParams& p) {
  p.validate();
  f.check_shape(x, "theta_value_grad");
  double fv = 0.0;
  Matrix g;
  f.value_grad(x, fv, g);
  auto [pv, pg] = penalty_value_grad(x, p);
  return {fv + pv, g + pg};
}

double theta_value(const Objective& f, const Matrix& x, const PenaltyParams& p) {
  p.validate();
  f.check_shape(x, "theta_value");
  return f.value(x) + penalty_value(x, p);
}

PenalizedObjective::PenalizedObjective(const Objective& f, PenaltyParams p)
    : f_(f), p_(p) {
  p_.validate();
}

double PenalizedObjective::value(const Matrix& x) const {
  return f_.value(x) + penalty_value(x, p_);
}

Matrix PenalizedObjective::gradient(const Matrix& x) const {
  return f_.gradient(x) + penalty_value_grad(x, p_).second;
}

void PenalizedObjective::value_grad(const Matrix& x, double& v,
                                    Matrix& g) const {
  f_.value_grad(x, v, g);
  auto [pv, pg] = penalty_value_grad(x, p_);
  v += pv;
  g += pg;
}

}  // namespace nnorth
