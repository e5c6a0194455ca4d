#include "nnorth/outer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

namespace nnorth {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

SolveReport make_report(const StiefelPoint& x) {
  return SolveReport{x, 0.0, 0.0, 0.0, 0.0, 0, 0, 0.0,
                     StopReason::kOuterLimit, false, {}, {}, {}};
}

void finalize(SolveReport& rep, const Objective& f, const Matrix& grad_theta,
              Clock::time_point t0) {
  const Matrix& x = rep.x_final.mat();
  rep.f_final = f.value(x);
  rep.ninf = vartheta(x);
  rep.orth_residual = orth_residual(x);
  rep.stationarity = proj_tangent_raw(x, grad_theta).norm();
  rep.wall_time = seconds_since(t0);
}

}  // namespace

std::string_view to_string(StopReason r) {
  switch (r) {
    case StopReason::kFeasible: return "feasible";
    case StopReason::kStagnated: return "stagnated";
    case StopReason::kOuterLimit: return "outer_limit";
    case StopReason::kInnerFailure: return "inner_failure";
  }
  return "unknown";
}

PenaltyConfig PenaltyConfig::seppg_plus() {
  PenaltyConfig c;
  c.gamma = 0.05;
  c.tau0 = 1.0;
  return c;
}

PenaltyConfig PenaltyConfig::seppg_zero() {
  PenaltyConfig c;
  c.gamma = 0.0;
  c.tau0 = 0.005;
  return c;
}

void PenaltyConfig::validate() const {
  if (!(gamma >= 0.0)) throw ParameterError("penalty: gamma must be >= 0");
  if (rho0 && !(*rho0 > 0.0)) throw ParameterError("penalty: rho0 must be > 0");
  if (!(c0 > 0.0)) throw ParameterError("penalty: c0 must be > 0");
  if (!(rho_max > 0.0)) throw ParameterError("penalty: rho_max must be > 0");
  if (!(sigma_rho_small > 1.0 && sigma_rho_large > 1.0)) {
    throw ParameterError("penalty: sigma_rho factors must be > 1");
  }
  if (!(tau0 > 0.0 && tau_min > 0.0)) {
    throw ParameterError("penalty: tau0 and tau_min must be > 0");
  }
  if (!(sigma_tau > 0.0 && sigma_tau < 1.0)) {
    throw ParameterError("penalty: sigma_tau must be in (0,1)");
  }
  if (!(epsilon > 0.0)) throw ParameterError("penalty: epsilon must be > 0");
  if (l_max < 1) throw ParameterError("penalty: l_max must be >= 1");
  if (!(rho_feas_threshold > 0.0)) {
    throw ParameterError("penalty: rho_feas_threshold must be > 0");
  }
  pgm.validate();
}

SolveReport seppg_solve(const Objective& f, const StiefelPoint& x0,
                        const PenaltyConfig& cfg) {
  cfg.validate();
  f.check_shape(x0.mat(), "seppg_solve");
  const auto t0 = Clock::now();

  double rho = 1.0;
  if (cfg.rho0) {
    rho = *cfg.rho0;
  } else {
    const double infeas = vartheta(x0.mat());
    if (infeas > 0.0) {
      const double guess = cfg.c0 * std::abs(f.value(x0.mat())) / infeas;
      if (guess > 0.0 && std::isfinite(guess)) rho = guess;
    }
  }
  rho = std::min(rho, cfg.rho_max);
  double tau = cfg.tau0;

  StiefelPoint start = x0;
  double upsilon = theta_value(f, x0.mat(), {rho, cfg.gamma});

  SolveReport rep = make_report(x0);
  Matrix grad_theta = theta_value_grad(f, x0.mat(), {rho, cfg.gamma}).second;

  for (int l = 0; l < cfg.l_max; ++l) {
    const PenaltyParams params{rho, cfg.gamma};
    const PenalizedObjective theta(f, params);
    PgmConfig inner = cfg.pgm;
    inner.grad_tol = tau;
    PgmResult sub = pgm_solve(theta, start, inner);

    rep.inner_iters_total += sub.iterations();
    rep.inner_traces.push_back(std::move(sub.trace));
    rep.inner_configs.push_back(inner);
    rep.x_final = sub.x;
    rep.outer_iters = l + 1;

    OuterRecord rec;
    rec.rho = rho;
    rec.tau = tau;
    rec.upsilon = upsilon;
    rec.theta = sub.value;
    rec.grad_norm = sub.grad_norm;
    rec.ninf = vartheta(sub.x.mat());
    rec.f = f.value(sub.x.mat());
    rec.inner_iters = sub.iterations();
    rec.inner_status = sub.status;
    if (sub.status != PgmStatus::kConverged || sub.value > upsilon) {
      rep.inner_flagged = true;
    }
    grad_theta = theta.gradient(sub.x.mat());

    if (sub.status == PgmStatus::kLineSearchFailed) {
      rep.trace.push_back(rec);
      rep.stop = StopReason::kInnerFailure;
      finalize(rep, f, grad_theta, t0);
      return rep;
    }

    bool stop = false;
    if (rec.ninf <= cfg.epsilon) {
      rep.stop = StopReason::kFeasible;
      stop = true;
    } else if (rec.ninf <= 5.0 * cfg.epsilon && rep.trace.size() >= 9) {
      const double f_back = rep.trace[rep.trace.size() - 9].f;
      if (std::abs(rec.f - f_back) / (1.0 + std::abs(rec.f)) <= 1e-8) {
        rep.stop = StopReason::kStagnated;
        stop = true;
      }
    }
    if (stop) {
      rep.trace.push_back(rec);
      finalize(rep, f, grad_theta, t0);
      return rep;
    }

    const double sigma_rho = rho <= 1.0 ? cfg.sigma_rho_small : cfg.sigma_rho_large;
    const double rho_next = std::min(sigma_rho * rho, cfg.rho_max);
    tau = std::max(cfg.sigma_tau * tau, cfg.tau_min);

    const PenaltyParams next{rho_next, cfg.gamma};
    const double theta_iter = theta_value(f, sub.x.mat(), next);
    start = sub.x;
    upsilon = theta_iter;
    if (rho >= cfg.rho_feas_threshold) {
      try {
        StiefelPoint rounded = round_to_feasible(sub.x.mat());
        const double theta_rounded = theta_value(f, rounded.mat(), next);
        if (theta_rounded < theta_iter) {
          start = std::move(rounded);
          upsilon = theta_rounded;
          rec.rounded_start = true;
        }
      } catch (const RoundingError&) {
        // Keep the unrounded warm start.
      }
    }
    rep.trace.push_back(rec);
    rho = rho_next;
  }

  rep.stop = StopReason::kOuterLimit;
  finalize(rep, f, grad_theta, t0);
  return rep;
}

AugmentedLagrangian::AugmentedLagrangian(const Objective& f, Matrix multiplier,
                                         double mu)
    : f_(f), lambda_(std::move(multiplier)), mu_(mu) {
  if (!(mu_ > 0.0)) throw ParameterError("augmented Lagrangian: mu must be > 0");
  f_.check_shape(lambda_, "AugmentedLagrangian");
}

double AugmentedLagrangian::value(const Matrix& x) const {
  const Matrix shifted = (x - lambda_ / mu_).array().min(0.0).matrix();
  return f_.value(x) + 0.5 * mu_ * shifted.squaredNorm() -
         lambda_.squaredNorm() / (2.0 * mu_);
}

Matrix AugmentedLagrangian::gradient(const Matrix& x) const {
  return f_.gradient(x) + mu_ * (x - lambda_ / mu_).array().min(0.0).matrix();
}

void AugmentedLagrangian::value_grad(const Matrix& x, double& v,
                                     Matrix& g) const {
  f_.value_grad(x, v, g);
  const Matrix shifted = (x - lambda_ / mu_).array().min(0.0).matrix();
  v += 0.5 * mu_ * shifted.squaredNorm() - lambda_.squaredNorm() / (2.0 * mu_);
  g += mu_ * shifted;
}

SolveReport alm_solve(const Objective& f, const StiefelPoint& x0, double mu0,
                      const AlmConfig& cfg) {
  if (!(mu0 > 0.0)) throw ParameterError("alm: mu0 must be > 0");
  if (!(cfg.growth > 1.0)) throw ParameterError("alm: growth must be > 1");
  if (cfg.max_outer < 1) throw ParameterError("alm: max_outer must be >= 1");
  cfg.pgm.validate();
  f.check_shape(x0.mat(), "alm_solve");
  const auto t0 = Clock::now();

  Matrix lambda = Matrix::Zero(x0.rows(), x0.cols());
  double mu = mu0;
  StiefelPoint x = x0;
  SolveReport rep = make_report(x0);
  Matrix grad_l;

  for (int k = 0; k < cfg.max_outer; ++k) {
    const AugmentedLagrangian lag(f, lambda, mu);
    PgmResult sub = pgm_solve(lag, x, cfg.pgm);
    x = sub.x;
    grad_l = lag.gradient(x.mat());

    OuterRecord rec;
    rec.rho = mu;
    rec.tau = cfg.pgm.grad_tol;
    rec.theta = sub.value;
    rec.grad_norm = sub.grad_norm;
    rec.ninf = vartheta(x.mat());
    rec.f = f.value(x.mat());
    rec.inner_iters = sub.iterations();
    rec.inner_status = sub.status;
    rec.upsilon = sub.trace.initial_value;
    rep.trace.push_back(rec);
    rep.inner_iters_total += sub.iterations();
    rep.inner_traces.push_back(std::move(sub.trace));
    rep.inner_configs.push_back(cfg.pgm);
    rep.x_final = x;
    rep.outer_iters = k + 1;
    if (sub.status != PgmStatus::kConverged) rep.inner_flagged = true;

    if (sub.status == PgmStatus::kLineSearchFailed) {
      rep.stop = StopReason::kInnerFailure;
      finalize(rep, f, grad_l, t0);
      return rep;
    }
    if (rec.ninf <= cfg.epsilon) {
      rep.stop = StopReason::kFeasible;
      finalize(rep, f, grad_l, t0);
      return rep;
    }
    lambda = (lambda - mu * x.mat()).array().max(0.0).matrix();
    mu *= cfg.growth;
  }
  rep.stop = StopReason::kOuterLimit;
  finalize(rep, f, grad_l, t0);
  return rep;
}

double stationarity_residual(const Objective& f, const StiefelPoint& x) {
  const Matrix& xm = x.mat();
  f.check_shape(xm, "stationarity_residual");
  if (vartheta(xm) > 5e-6) {
    throw PreconditionError("stationarity_residual: point is not feasible");
  }
  const Matrix grad = f.gradient(xm);
  const Eigen::ArrayXXd zero_mask = (xm.array() < 1e-8).cast<double>();
  if ((zero_mask == 0.0).all()) return proj_tangent_raw(xm, grad).norm();

  // Accelerated projected gradient on
  //   φ(G) = ½‖Proj_T(∇f + G)‖²,  G <= 0 on the zero pattern, 0 elsewhere.
  // Proj_T is an orthogonal projector, so ∇φ = mask ∘ Proj_T(∇f + G) with
  // Lipschitz constant 1.
  auto project = [&](const Matrix& g) -> Matrix {
    return (g.array().min(0.0) * zero_mask).matrix();
  };
  Matrix g = Matrix::Zero(xm.rows(), xm.cols());
  Matrix y = g;
  double theta = 1.0;
  double best = proj_tangent_raw(xm, grad).norm();
  double prev_obj = 0.5 * best * best;
  for (int it = 0; it < 50000; ++it) {
    const Matrix ry = proj_tangent_raw(xm, grad + y);
    const Matrix g_next = project(y - (ry.array() * zero_mask).matrix());
    const double res = proj_tangent_raw(xm, grad + g_next).norm();
    best = std::min(best, res);
    const double obj = 0.5 * res * res;
    if (obj > prev_obj) {
      // Restart the momentum when the objective goes up.
      theta = 1.0;
      y = g;
      prev_obj = 0.5 * proj_tangent_raw(xm, grad + g).squaredNorm();
      continue;
    }
    const double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
    y = g_next + ((theta - 1.0) / theta_next) * (g_next - g);
    const double step = (g_next - g).norm();
    g = g_next;
    theta = theta_next;
    prev_obj = obj;
    if (best <= 1e-14 || step <= 1e-15 * (1.0 + g.norm())) break;
  }
  return best;
}

}  // namespace nnorth
