#include "nnorth/pgm.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <optional>
#include <sstream>

namespace nnorth {

void PgmConfig::validate() const {
  if (!(eta > 0.0 && eta < 1.0)) throw ParameterError("pgm: eta must be in (0,1)");
  if (!(alpha > 0.0)) throw ParameterError("pgm: alpha must be > 0");
  if (memory < 0) throw ParameterError("pgm: memory must be >= 0");
  if (!(t_min > 0.0 && t_min <= t_max)) {
    throw ParameterError("pgm: need 0 < t_min <= t_max");
  }
  if (!(grad_tol > 0.0)) throw ParameterError("pgm: grad_tol must be > 0");
  if (max_iters < 1) throw ParameterError("pgm: max_iters must be >= 1");
  if (max_backtracks < 1) throw ParameterError("pgm: max_backtracks must be >= 1");
}

std::string_view to_string(PgmStatus s) {
  switch (s) {
    case PgmStatus::kConverged: return "converged";
    case PgmStatus::kMaxIters: return "max_iters";
    case PgmStatus::kLineSearchFailed: return "line_search_failed";
  }
  return "unknown";
}

double bb_stepsize(const Matrix& dx, const Matrix& dy, double t_min,
                   double t_max, double fallback) {
  require_same_shape(dx, dy, "bb_stepsize");
  auto clamp = [&](double t) { return std::max(std::min(t, t_max), t_min); };
  const double sx = dx.squaredNorm();
  const double sy = dy.squaredNorm();
  const double inner = std::abs((dx.array() * dy.array()).sum());
  if (sy == 0.0 || !(inner >= 1e-16 * std::sqrt(sx) * std::sqrt(sy)) ||
      inner == 0.0) {
    return clamp(fallback);
  }
  return clamp(std::min(sx / inner, inner / sy));
}

std::vector<double> PgmTrace::window_max_sequence(int memory) const {
  std::vector<double> values;
  values.reserve(iters.size() + 1);
  values.push_back(initial_value);
  for (const auto& it : iters) values.push_back(it.value);
  std::vector<double> out(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) {
    const std::size_t lo = k >= static_cast<std::size_t>(memory) ? k - memory : 0;
    out[k] = *std::max_element(values.begin() + lo, values.begin() + k + 1);
  }
  return out;
}

std::vector<double> PgmTrace::nonmonotone_summands(int memory) const {
  const auto wmax = window_max_sequence(memory);
  std::vector<double> out;
  out.reserve(iters.size());
  for (std::size_t k = 0; k < iters.size(); ++k) {
    out.push_back(std::sqrt(std::max(0.0, wmax[k + 1] - iters[k].value)));
  }
  return out;
}

PgmStepResult pgm_step(const Objective& obj, const StiefelPoint& x,
                       const Matrix& rgrad, double t_init, double window_max,
                       const PgmConfig& cfg) {
  double t = t_init;
  for (int bt = 0; bt <= cfg.max_backtracks; ++bt) {
    Matrix v = -t * rgrad;
    const double vsq = v.squaredNorm();
    StiefelPoint xn = retract_qr(x, v);
    const double value = obj.value(xn.mat());
    if (value <= window_max - cfg.alpha / (2.0 * t) * vsq) {
      return PgmStepResult{std::move(xn), std::move(v), t, value, bt};
    }
    t *= cfg.eta;
  }
  std::ostringstream os;
  os << "nonmonotone line search failed after " << cfg.max_backtracks
     << " reductions (t=" << t << ")";
  throw LineSearchError(os.str());
}

PgmResult pgm_solve(const Objective& obj, const StiefelPoint& x0,
                    const PgmConfig& cfg) {
  cfg.validate();
  obj.check_shape(x0.mat(), "pgm_solve");

  auto clamp = [&](double t) {
    return std::max(std::min(t, cfg.t_max), cfg.t_min);
  };

  StiefelPoint x = x0;
  double value = 0.0;
  Matrix egrad;
  obj.value_grad(x.mat(), value, egrad);
  Matrix rgrad = proj_tangent_raw(x.mat(), egrad);
  double gnorm = rgrad.norm();

  PgmResult res{x, value, gnorm, PgmStatus::kConverged, {}, {}};
  res.trace.initial_value = value;
  res.trace.initial_grad_norm = gnorm;
  if (gnorm <= cfg.grad_tol) {
    res.trace.first_t = clamp(gnorm > 0.0 ? 1.0 / gnorm : 1.0);
    return res;
  }

  // Ring buffer of the last memory+1 objective values.
  std::deque<double> window{value};
  struct Snapshot {
    StiefelPoint x;
    double value;
    double grad_norm;
  };
  std::deque<Snapshot> recent{{x, value, gnorm}};

  Matrix prev_x;
  Matrix prev_rgrad;
  double prev_t = 1.0;

  for (int k = 0; k < cfg.max_iters; ++k) {
    double t;
    if (k == 0) {
      t = clamp(1.0 / gnorm);
      res.trace.first_t = t;
    } else {
      t = bb_stepsize(x.mat() - prev_x, rgrad - prev_rgrad, cfg.t_min,
                      cfg.t_max, prev_t);
    }
    const double wmax = *std::max_element(window.begin(), window.end());

    std::optional<PgmStepResult> step;
    try {
      step.emplace(pgm_step(obj, x, rgrad, t, wmax, cfg));
    } catch (const LineSearchError& e) {
      res.x = x;
      res.value = value;
      res.grad_norm = gnorm;
      res.status = PgmStatus::kLineSearchFailed;
      res.message = e.what();
      return res;
    }

    prev_x = x.mat();
    prev_rgrad = rgrad;
    prev_t = step->t;
    x = std::move(step->x);
    obj.value_grad(x.mat(), value, egrad);
    rgrad = proj_tangent_raw(x.mat(), egrad);
    gnorm = rgrad.norm();

    res.trace.iters.push_back(PgmIterRecord{value, wmax, step->v.norm(), step->t,
                                            gnorm, step->backtracks});
    window.push_back(value);
    if (window.size() > static_cast<std::size_t>(cfg.memory) + 1) window.pop_front();
    recent.push_back({x, value, gnorm});
    if (recent.size() > static_cast<std::size_t>(cfg.memory) + 1) recent.pop_front();

    if (gnorm <= cfg.grad_tol) {
      res.x = x;
      res.value = value;
      res.grad_norm = gnorm;
      res.status = PgmStatus::kConverged;
      return res;
    }
  }

  const auto best = std::min_element(
      recent.begin(), recent.end(),
      [](const Snapshot& a, const Snapshot& b) { return a.value < b.value; });
  res.x = best->x;
  res.value = best->value;
  res.grad_norm = best->grad_norm;
  res.status = PgmStatus::kMaxIters;
  return res;
}

}  // namespace nnorth
