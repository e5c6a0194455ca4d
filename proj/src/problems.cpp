#include "nnorth/problems.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace nnorth {

void QapInstance::validate() const {
  if (n < 1) throw InputError("QAP instance: n must be >= 1");
  if (a.rows() != n || a.cols() != n || b.rows() != n || b.cols() != n) {
    std::ostringstream os;
    os << "QAP instance: expected " << n << "x" << n << " matrices, got A "
       << a.rows() << "x" << a.cols() << " and B " << b.rows() << "x" << b.cols();
    throw DimensionError(os.str());
  }
}

QapObjective::QapObjective(QapInstance inst) : inst_(std::move(inst)) {
  inst_.validate();
}

double QapObjective::value(const Matrix& x) const {
  check_shape(x, "QapObjective::value");
  const Matrix w = x.cwiseProduct(x);
  return (inst_.a.cwiseProduct(w * inst_.b * w.transpose())).sum();
}

Matrix QapObjective::gradient(const Matrix& x) const {
  double v;
  Matrix g;
  value_grad(x, v, g);
  return g;
}

void QapObjective::value_grad(const Matrix& x, double& v, Matrix& g) const {
  check_shape(x, "QapObjective::value_grad");
  const Matrix w = x.cwiseProduct(x);
  const Matrix awbt = inst_.a * w * inst_.b.transpose();
  const Matrix atwb = inst_.a.transpose() * w * inst_.b;
  // ⟨A, WBWᵀ⟩ = ⟨AWBᵀ, W⟩
  v = awbt.cwiseProduct(w).sum();
  g = 2.0 * x.cwiseProduct(awbt + atwb);
}

double QapObjective::classical_value(const Matrix& p) const {
  check_shape(p, "QapObjective::classical_value");
  return (inst_.a.cwiseProduct(p * inst_.b * p.transpose())).sum();
}

AffinityInstance AffinityInstance::from_matrix(Matrix k, std::string name) {
  const auto n = static_cast<Index>(std::llround(std::sqrt(double(k.rows()))));
  if (k.rows() != k.cols() || n * n != k.rows() || n < 1) {
    std::ostringstream os;
    os << "affinity matrix must be n^2 x n^2, got " << k.rows() << "x" << k.cols();
    throw DimensionError(os.str());
  }
  AffinityInstance inst;
  inst.name = std::move(name);
  inst.n = n;
  inst.k = 0.5 * (k + k.transpose());
  return inst;
}

GraphMatchingObjective::GraphMatchingObjective(AffinityInstance inst)
    : inst_(std::move(inst)) {}

double GraphMatchingObjective::value(const Matrix& x) const {
  check_shape(x, "GraphMatchingObjective::value");
  const Eigen::Map<const Vector> v(x.data(), x.size());
  return -v.dot(inst_.k * v);
}

Matrix GraphMatchingObjective::gradient(const Matrix& x) const {
  check_shape(x, "GraphMatchingObjective::gradient");
  const Eigen::Map<const Vector> v(x.data(), x.size());
  const Vector kv = -2.0 * (inst_.k * v);
  return Eigen::Map<const Matrix>(kv.data(), x.rows(), x.cols());
}

void GraphMatchingObjective::value_grad(const Matrix& x, double& val,
                                        Matrix& g) const {
  check_shape(x, "GraphMatchingObjective::value_grad");
  const Eigen::Map<const Vector> v(x.data(), x.size());
  const Vector kv = inst_.k * v;
  val = -v.dot(kv);
  g = Eigen::Map<const Matrix>(kv.data(), x.rows(), x.cols()) * -2.0;
}

ProjectionObjective::ProjectionObjective(Matrix c) : c_(std::move(c)) {
  require_valid_dense(c_, "ProjectionObjective");
}

double ProjectionObjective::value(const Matrix& x) const {
  check_shape(x, "ProjectionObjective::value");
  return (x - c_).squaredNorm();
}

Matrix ProjectionObjective::gradient(const Matrix& x) const {
  check_shape(x, "ProjectionObjective::gradient");
  return 2.0 * (x - c_);
}

Matrix ProjectionObjective::hessian_vec(const Matrix& x, const Matrix& h) const {
  check_shape(x, "ProjectionObjective::hessian_vec");
  return 2.0 * h;
}

OnmfObjective::OnmfObjective(const Matrix& a, const Matrix& y)
    : a_sq_(a.squaredNorm()), ay_(a * y), yty_(y.transpose() * y) {
  if (a.cols() != y.rows()) {
    throw DimensionError("OnmfObjective: A and Y have incompatible shapes");
  }
}

double OnmfObjective::value(const Matrix& x) const {
  check_shape(x, "OnmfObjective::value");
  const Matrix xtx = x.transpose() * x;
  return a_sq_ - 2.0 * ay_.cwiseProduct(x).sum() + xtx.cwiseProduct(yty_).sum();
}

Matrix OnmfObjective::gradient(const Matrix& x) const {
  check_shape(x, "OnmfObjective::gradient");
  return 2.0 * (x * yty_ - ay_);
}

void OnmfObjective::value_grad(const Matrix& x, double& v, Matrix& g) const {
  check_shape(x, "OnmfObjective::value_grad");
  const Matrix xy = x * yty_;
  v = a_sq_ - 2.0 * ay_.cwiseProduct(x).sum() + xy.cwiseProduct(x).sum();
  g = 2.0 * (xy - ay_);
}

void OnmfInstance::validate() const {
  if (a.size() == 0) throw InputError("ONMF instance: empty data matrix");
  if ((a.array() < 0.0).any()) throw InputError("ONMF instance: A must be nonnegative");
  if (r < 1 || r > a.rows()) throw InputError("ONMF instance: need 1 <= r <= n");
}

std::string_view to_string(SolverKind k) {
  switch (k) {
    case SolverKind::kSeppgPlus: return "seppg_plus";
    case SolverKind::kSeppgZero: return "seppg_zero";
    case SolverKind::kAlm: return "alm";
  }
  return "unknown";
}

SolverKind parse_solver_kind(std::string_view s) {
  if (s == "seppg_plus") return SolverKind::kSeppgPlus;
  if (s == "seppg_zero") return SolverKind::kSeppgZero;
  if (s == "alm") return SolverKind::kAlm;
  throw InputError("unknown solver '" + std::string(s) + "'");
}

SolveReport run_solver(SolverKind kind, const Objective& f,
                       const StiefelPoint& x0, const PenaltyConfig& penalty,
                       const AlmConfig& alm, std::optional<double> weight0) {
  if (kind == SolverKind::kAlm) return alm_solve(f, x0, weight0.value_or(10.0), alm);
  if ((kind == SolverKind::kSeppgZero) != (penalty.gamma == 0.0)) {
    throw ParameterError("solver " + std::string(to_string(kind)) +
                         " does not match gamma of the penalty config");
  }
  PenaltyConfig cfg = penalty;
  if (weight0) cfg.rho0 = weight0;
  return seppg_solve(f, x0, cfg);
}

Matrix onmf_update_y(const Matrix& a, const Matrix& x) {
  if (a.rows() != x.rows()) throw DimensionError("onmf_update_y: shape mismatch");
  const Matrix xtx = x.transpose() * x;
  Eigen::LDLT<Matrix> ldlt(xtx);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
      ldlt.rcond() < 1e-14) {
    throw InputError("onmf_update_y: XᵀX is singular");
  }
  // AᵀX(XᵀX)⁻¹ = (solve(XᵀX, XᵀA))ᵀ since XᵀX is symmetric.
  const Matrix yt = ldlt.solve(x.transpose() * a);
  return yt.transpose().cwiseMax(0.0);
}

std::vector<int> row_labels(const Matrix& x) {
  std::vector<int> out(x.rows());
  for (Index i = 0; i < x.rows(); ++i) {
    Index j;
    x.row(i).maxCoeff(&j);
    out[i] = static_cast<int>(j);
  }
  return out;
}

OnmfResult onmf_alternate(const OnmfInstance& inst, const StiefelPoint& x0,
                          const OnmfConfig& cfg) {
  inst.validate();
  if (x0.rows() != inst.a.rows() || x0.cols() != inst.r) {
    throw DimensionError("onmf_alternate: x0 must be n x r");
  }
  const std::optional<double> weight0 =
      cfg.weight0 ? cfg.weight0 : std::optional<double>(1.0 / inst.a.norm());

  StiefelPoint x = x0;
  Matrix y = onmf_update_y(inst.a, x.mat());
  OnmfResult res{x, y, {}, 0};
  double prev = (inst.a - x.mat() * y.transpose()).squaredNorm();

  PenaltyConfig penalty = cfg.penalty;
  if (cfg.solver == SolverKind::kSeppgZero) penalty.gamma = 0.0;
  if (cfg.solver == SolverKind::kSeppgPlus && penalty.gamma == 0.0) penalty.gamma = 0.05;

  for (int it = 0; it < cfg.max_alternations; ++it) {
    const OnmfObjective fy(inst.a, y);
    SolveReport rep = run_solver(cfg.solver, fy, x, penalty, cfg.alm, weight0);
    res.inner_iters_total += rep.inner_iters_total;
    const Matrix y_next = onmf_update_y(inst.a, rep.x_final.mat());
    const double obj =
        (inst.a - rep.x_final.mat() * y_next.transpose()).squaredNorm();
    if (obj > prev) {
      // The X-solve may land in a worse feasible basin; keep the previous
      // pair so the objective sequence stays nonincreasing.
      res.history.push_back(prev);
      break;
    }
    x = rep.x_final;
    y = y_next;
    res.history.push_back(obj);
    const double rel = std::abs(prev - obj) / std::max(prev, 1e-300);
    prev = obj;
    if (rel <= cfg.rel_tol) break;
  }
  res.x = x;
  res.y = y;
  return res;
}

Matrix gaussian_matrix(Index n, Index r, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  Matrix g(n, r);
  for (Index j = 0; j < r; ++j) {
    for (Index i = 0; i < n; ++i) g(i, j) = dist(gen);
  }
  return g;
}

StiefelPoint random_stiefel_start(Index n, Index r, std::uint64_t seed) {
  if (n < r || r < 1) throw DimensionError("random_stiefel_start: need n >= r >= 1");
  return StiefelPoint::orthonormalize(gaussian_matrix(n, r, seed));
}

Matrix nonneg_start(Index n, Index r, std::uint64_t seed) {
  if (n < r || r < 1) throw DimensionError("nonneg_start: need n >= r >= 1");
  Matrix g = gaussian_matrix(n, r, seed).cwiseAbs();
  for (Index j = 0; j < r; ++j) g.col(j) /= g.col(j).norm();
  return g;
}

}  // namespace nnorth
