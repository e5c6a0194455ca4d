#include "nnorth/diagnostics.hpp"

#include "nnorth/outer.hpp"
#include "nnorth/penalty.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

namespace nnorth {

namespace {

constexpr double kZeroRowTol = 1e-8;
constexpr double kOracleLimit = 1e6;

}  // namespace

double kappa_unchecked(const Matrix& xbar) {
  const Index n = xbar.rows();
  const Index r = xbar.cols();
  if (n == r) return 2.1 * std::sqrt(double(n));
  if (r == 1) return 1.0;
  double smallest = std::numeric_limits<double>::infinity();
  for (Index j = 0; j < r; ++j) {
    for (Index i = 0; i < n; ++i) {
      const double v = xbar(i, j);
      if (v > 0.0 && v < smallest) smallest = v;
    }
  }
  if (!std::isfinite(smallest)) {
    throw InputError("kappa: base point has no positive entry");
  }
  return 2.1 * std::sqrt(double(r)) * (1.0 + 3.0 * double(r) * double(n - r)) /
         smallest;
}

double kappa(const Matrix& xbar) {
  require_valid_dense(xbar, "kappa");
  if (!is_nonneg_orthogonal(xbar, 1e-10)) {
    throw PreconditionError("kappa: base point is not in S+(n,r)");
  }
  const Index n = xbar.rows();
  const Index r = xbar.cols();
  if (n > r && r > 1) {
    for (Index i = 0; i < n; ++i) {
      if (xbar.row(i).norm() < kZeroRowTol) {
        throw HypothesisError("kappa: base point has a zero row " +
                              std::to_string(i) + " with n > r > 1");
      }
    }
  }
  return kappa_unchecked(xbar);
}

SplusProjection brute_force_dist_splus(const Matrix& x) {
  require_valid_dense(x, "brute_force_dist_splus");
  const Index n = x.rows();
  const Index r = x.cols();
  const double patterns = std::pow(double(r + 1), double(n));
  if (patterns > kOracleLimit) {
    std::ostringstream os;
    os << "brute_force_dist_splus: (r+1)^n = " << patterns << " exceeds "
       << kOracleLimit;
    throw OracleSizeError(os.str());
  }

  const Vector col_sq = x.colwise().squaredNorm().transpose();
  std::vector<Index> assign(n, 0);  // value r means "row left empty"
  std::vector<Index> best_assign;
  double best = std::numeric_limits<double>::infinity();

  std::vector<double> pos_sq(r), max_entry(r);
  std::vector<bool> used(r);
  const auto total = static_cast<long long>(patterns);
  for (long long code = 0; code < total; ++code) {
    long long c = code;
    for (Index i = 0; i < n; ++i) {
      assign[i] = static_cast<Index>(c % (r + 1));
      c /= (r + 1);
    }
    std::fill(pos_sq.begin(), pos_sq.end(), 0.0);
    std::fill(max_entry.begin(), max_entry.end(),
              -std::numeric_limits<double>::infinity());
    std::fill(used.begin(), used.end(), false);
    for (Index i = 0; i < n; ++i) {
      const Index j = assign[i];
      if (j == r) continue;
      used[j] = true;
      const double v = x(i, j);
      if (v > 0.0) pos_sq[j] += v * v;
      max_entry[j] = std::max(max_entry[j], v);
    }
    double d2 = 0.0;
    bool feasible = true;
    for (Index j = 0; j < r; ++j) {
      if (!used[j]) {
        feasible = false;
        break;
      }
      // Best nonnegative unit column supported on the assigned rows: the
      // normalized positive part, or the largest entry's unit vector when no
      // entry is positive.
      const double inner = pos_sq[j] > 0.0 ? std::sqrt(pos_sq[j]) : max_entry[j];
      d2 += col_sq(j) + 1.0 - 2.0 * inner;
    }
    if (feasible && d2 < best) {
      best = d2;
      best_assign = assign;
    }
  }

  Matrix nearest = Matrix::Zero(n, r);
  for (Index j = 0; j < r; ++j) {
    Index argmax = -1;
    for (Index i = 0; i < n; ++i) {
      if (best_assign[i] != j) continue;
      nearest(i, j) = std::max(x(i, j), 0.0);
      if (argmax < 0 || x(i, j) > x(argmax, j)) argmax = i;
    }
    const double norm = nearest.col(j).norm();
    if (norm > 0.0) {
      nearest.col(j) /= norm;
    } else {
      nearest(argmax, j) = 1.0;
    }
  }
  return SplusProjection{std::sqrt(std::max(best, 0.0)), std::move(nearest)};
}

ErrorBoundSample evaluate_error_bound(const Matrix& x, double kappa_value) {
  ErrorBoundSample s;
  s.x = x;
  s.dist_splus = brute_force_dist_splus(x).distance;
  s.dist_cone = std::sqrt(quad_penalty(x));
  s.dist_st = dist_to_stiefel(x);
  s.kappa = kappa_value;
  s.holds = s.dist_splus <= (kappa_value + 1.0) * (s.dist_cone + s.dist_st);
  return s;
}

std::vector<ErrorBoundSample> error_bound_sweep(const Matrix& xbar, double delta,
                                                int num_samples, std::uint64_t seed,
                                                bool check_hypothesis) {
  if (!(delta > 0.0)) throw ParameterError("error_bound_sweep: delta must be > 0");
  if (num_samples < 0) throw ParameterError("error_bound_sweep: negative sample count");
  const double k = check_hypothesis ? kappa(xbar) : kappa_unchecked(xbar);
  const double dim = double(xbar.size());

  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  std::vector<ErrorBoundSample> out;
  out.reserve(num_samples);
  for (int s = 0; s < num_samples; ++s) {
    Matrix dir(xbar.rows(), xbar.cols());
    for (Index j = 0; j < dir.cols(); ++j) {
      for (Index i = 0; i < dir.rows(); ++i) dir(i, j) = normal(gen);
    }
    const double radius = delta * std::pow(uniform(gen), 1.0 / dim);
    out.push_back(evaluate_error_bound(xbar + (radius / dir.norm()) * dir, k));
  }
  return out;
}

void write_error_bound_csv(std::ostream& os,
                           const std::vector<ErrorBoundSample>& samples) {
  os << "dist_splus,dist_cone,dist_st,kappa,holds\n";
  char buf[256];
  for (const auto& s : samples) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%d\n", s.dist_splus,
                  s.dist_cone, s.dist_st, s.kappa, s.holds ? 1 : 0);
    os << buf;
  }
}

double sosc_form(const Objective& f, const Matrix& xbar, const Matrix& h) {
  const Matrix grad = f.gradient(xbar);
  const double curvature = h.cwiseProduct(f.hessian_vec(xbar, h)).sum();
  const double correction =
      (h.transpose() * h).cwiseProduct(xbar.transpose() * grad).sum();
  return curvature - correction;
}

SoscReport sosc_probe(const Objective& f, const StiefelPoint& xbar,
                      int num_dirs, std::uint64_t seed) {
  const Matrix& xm = xbar.mat();
  f.check_shape(xm, "sosc_probe");
  if (vartheta(xm) > 5e-6) throw PreconditionError("sosc_probe: xbar is infeasible");
  const double residual = stationarity_residual(f, xbar);
  if (residual > 1e-6) {
    std::ostringstream os;
    os << "sosc_probe: xbar is not stationary (residual " << residual << ")";
    throw PreconditionError(os.str());
  }

  const Matrix tgrad = proj_tangent_raw(xm, f.gradient(xm));
  const double tgrad_sq = tgrad.squaredNorm();
  const Eigen::ArrayXXd zero = (xm.array() < 1e-8).cast<double>();

  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  SoscReport rep;
  rep.min_value = std::numeric_limits<double>::infinity();
  for (int d = 0; d < num_dirs; ++d) {
    Matrix z(xm.rows(), xm.cols());
    for (Index j = 0; j < z.cols(); ++j) {
      for (Index i = 0; i < z.rows(); ++i) z(i, j) = normal(gen);
    }
    ++rep.sampled;
    Matrix h = proj_tangent_raw(xm, z);
    if (tgrad_sq > 0.0) h -= (h.cwiseProduct(tgrad).sum() / tgrad_sq) * tgrad;
    const double hn = h.norm();
    if (hn < 1e-12) continue;
    h /= hn;
    const Matrix cone = -xm * (h.transpose() * h);
    if (((cone.array() < -1e-10) && (zero > 0.0)).any()) continue;
    ++rep.surviving;
    rep.min_value = std::min(rep.min_value, sosc_form(f, xm, h));
  }
  rep.inconclusive = rep.surviving == 0;
  if (rep.inconclusive) rep.min_value = 0.0;
  rep.strictly_positive = !rep.inconclusive && rep.min_value > 1e-10;
  return rep;
}

}  // namespace nnorth
