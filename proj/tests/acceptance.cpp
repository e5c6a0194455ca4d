// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include "nnorth/bench.hpp"
#include "nnorth/diagnostics.hpp"
#include "nnorth/penalty.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>

namespace {

using namespace nnorth;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Every SolveReport produced by the suite, for the orthogonality criterion.
std::vector<double> g_orth_residuals;
// Inner traces (with their configs) from the projection and small-QAP runs.
std::vector<std::pair<PgmTrace, PgmConfig>> g_traces;
// Criterion-7 reports kept for the stationarity criterion.
std::vector<SolveReport> g_qap_reports;
std::vector<std::shared_ptr<QapObjective>> g_qap_objectives;
std::vector<std::size_t> g_qap_report_instance;

void record(const SolveReport& rep, bool keep_traces) {
  g_orth_residuals.push_back(rep.orth_residual);
  if (!keep_traces) return;
  for (std::size_t l = 0; l < rep.inner_traces.size(); ++l)
    g_traces.emplace_back(rep.inner_traces[l], rep.inner_configs[l]);
}

Matrix away_from_kinks(Matrix x, double gamma, double gap) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double& v = x.data()[i];
    for (double kink : {0.0, -gamma})
      if (std::abs(v - kink) < gap) v = kink + (v >= kink ? gap : -gap);
  }
  return x;
}

Matrix random_qap_matrix(int n, std::mt19937_64& gen) {
  std::uniform_int_distribution<int> ud(0, 9);
  Matrix m = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) m(i, j) = ud(gen);
  return m;
}

// 1. Gradients of the four objective families and of the penalized function.
Outcome gradients() {
  const auto t0 = Clock::now();
  std::mt19937_64 gen(101);
  std::vector<std::pair<std::string, std::shared_ptr<Objective>>> fams;
  fams.emplace_back("qap", std::make_shared<QapObjective>(QapInstance{
                               "q", 5, oracle::gaussian(5, 5, gen).cwiseAbs(),
                               oracle::gaussian(5, 5, gen).cwiseAbs(), std::nullopt}));
  fams.emplace_back("gm", std::make_shared<GraphMatchingObjective>(
                              AffinityInstance::from_matrix(oracle::gaussian(16, 16, gen))));
  fams.emplace_back("proj", std::make_shared<ProjectionObjective>(oracle::gaussian(6, 3, gen)));
  fams.emplace_back("onmf", std::make_shared<OnmfObjective>(oracle::gaussian(7, 5, gen).cwiseAbs(),
                                                            oracle::gaussian(5, 3, gen).cwiseAbs()));
  double worst = 0.0;
  std::string worst_case;
  int cases = 0;
  auto check = [&](const std::string& name, const std::function<double(const Matrix&)>& value,
                   const std::function<Matrix(const Matrix&)>& grad, Index n, Index r,
                   double gamma) {
    ++cases;
    for (int p = 0; p < 20; ++p) {
      const Matrix x = away_from_kinks(0.5 * oracle::gaussian(n, r, gen), gamma, 1e-4);
      const Matrix fd = oracle::fd_gradient(value, x, 1e-6);
      const double err = (grad(x) - fd).norm() / fd.norm();
      if (err > worst) worst = err, worst_case = name;
    }
  };
  for (const auto& [name, f] : fams) {
    check(name, [&](const Matrix& x) { return f->value(x); },
          [&](const Matrix& x) { return f->gradient(x); }, f->rows(), f->cols(), 0.0);
    for (double gamma : {0.0, 0.05}) {
      for (double rho : {1.0, 1e3}) {
        const PenaltyParams pp{rho, gamma};
        check("theta/" + name + fmt("/g=%g", gamma) + fmt("/rho=%g", rho),
              [&](const Matrix& x) { return theta_value(*f, x, pp); },
              [&](const Matrix& x) { return theta_value_grad(*f, x, pp).second; }, f->rows(),
              f->cols(), gamma);
      }
    }
  }
  const double secs = seconds_since(t0);
  const bool ok = worst <= 1e-5 && secs < 10.0;
  return {ok, std::to_string(cases) + " cases x 20 points, max rel err " + fmt("%.2e", worst) +
                  " (" + worst_case + "), " + fmt("%.2f s", secs)};
}

// 2. Prox and envelope against the grid-search oracle.
Outcome prox_grid() {
  std::mt19937_64 gen(102);
  const double gamma = 0.05;
  std::uniform_real_distribution<double> ud(-5 * gamma, 5 * gamma);
  double worst_p = 0.0, worst_e = 0.0;
  for (int k = 0; k < 100; ++k) {
    const double x = ud(gen);
    const auto ref = oracle::grid_prox(x, gamma);
    const Matrix xm = Matrix::Constant(1, 1, x);
    worst_p = std::max(worst_p, std::abs(prox_vartheta(xm, gamma)(0, 0) - ref.argmin));
    worst_e = std::max(worst_e, std::abs(moreau_env_vartheta(xm, gamma) - ref.value));
  }
  return {worst_p <= 1e-6 && worst_e <= 1e-6,
          "100 inputs, max |prox err| " + fmt("%.2e", worst_p) + ", max |env err| " +
              fmt("%.2e", worst_e)};
}

// 4. Projection onto the feasible set from a feasible target.
Outcome projection_feasibility() {
  std::string detail;
  bool ok = true;
  std::mt19937_64 gen(104);
  std::vector<Matrix> targets;
  for (int k = 0; k < 5; ++k) targets.push_back(oracle::random_feasible(6, 3, gen));
  for (SolverKind kind : {SolverKind::kSeppgPlus, SolverKind::kSeppgZero, SolverKind::kAlm}) {
    double worst_ninf = 0.0, worst_dist = 0.0, worst_time = 0.0, max_tau = 0.0;
    int stagnated = 0;
    for (std::size_t k = 0; k < targets.size(); ++k) {
      const Matrix& c = targets[k];
      ProjectionObjective f(c);
      const auto penalty = kind == SolverKind::kSeppgPlus ? PenaltyConfig::seppg_plus()
                                                          : PenaltyConfig::seppg_zero();
      std::optional<double> w;
      if (kind == SolverKind::kAlm) w = 1.0 / c.norm();
      const auto t0 = Clock::now();
      const auto rep =
          run_solver(kind, f, random_stiefel_start(6, 3, 40 + k), penalty, AlmConfig{}, w);
      worst_time = std::max(worst_time, seconds_since(t0));
      record(rep, true);
      worst_ninf = std::max(worst_ninf, rep.ninf);
      worst_dist = std::max(worst_dist, (rep.x_final.mat() - c).norm());
      if (!rep.trace.empty()) max_tau = std::max(max_tau, rep.trace.back().tau);
      stagnated += rep.stop == StopReason::kStagnated;
    }
    const bool solver_ok = worst_ninf <= 1e-6 && worst_dist <= 1e-4 && worst_time < 5.0;
    ok = ok && solver_ok;
    detail += std::string(to_string(kind)) + ": ninf " + fmt("%.1e", worst_ninf) + ", |x-C| " +
              fmt("%.1e", worst_dist) + ", " + fmt("%.2f s", worst_time) + ", tau at exit <= " +
              fmt("%.1e", max_tau) + ", stagnation exits " + std::to_string(stagnated) + "; ";
  }
  detail.resize(detail.size() - 2);
  return {ok, "5 targets per solver, worst " + detail};
}

// 5. The 3×2 linear example: feasibility violation 1/k² against an O(1/k) objective gap.
Outcome example_sequence() {
  bool ok = true;
  std::string detail;
  for (double k : {1e2, 1e3, 1e4}) {
    const Matrix x = oracle::example_point(k);
    const double orth = orth_residual(x);
    const bool exact_theta = vartheta(x) == 1.0 / (k * k);
    const double gap = -4.0 - oracle::example_objective(x);
    ok = ok && orth <= 1e-12 && exact_theta && gap > 0 && k * gap >= 1.5 && k * gap <= 2.5;
    detail += "k=" + fmt("%g", k) + ": k*gap " + fmt("%.6f", k * gap) + ", orth " +
              fmt("%.1e", orth) + (exact_theta ? "" : ", theta mismatch") + "; ";
  }
  detail.resize(detail.size() - 2);
  return {ok, detail};
}

// 6. Local error bound around base points without zero rows, and its failure
// for the zero-row family.
Outcome error_bound() {
  const auto t0 = Clock::now();
  std::vector<std::pair<std::string, Matrix>> bases;
  {
    Matrix x = Matrix::Zero(3, 2);
    x(0, 0) = x(2, 0) = std::sqrt(0.5);
    x(1, 1) = 1.0;
    bases.emplace_back("3x2", x);
  }
  {
    Matrix x = Matrix::Zero(4, 2);
    x(0, 0) = 0.6, x(2, 0) = 0.8, x(1, 1) = 0.8, x(3, 1) = 0.6;
    bases.emplace_back("4x2", x);
  }
  {
    Matrix x(6, 1);
    x << 1, 2, 3, 4, 5, 6;
    bases.emplace_back("6x1", x.normalized());
  }
  {
    Matrix x = Matrix::Zero(4, 4);
    x(0, 2) = x(1, 0) = x(2, 3) = x(3, 1) = 1.0;
    bases.emplace_back("4x4", x);
  }
  bool ok = true;
  std::string detail;
  for (std::size_t b = 0; b < bases.size(); ++b) {
    const auto samples = error_bound_sweep(bases[b].second, 0.05, 1000, 600 + b);
    int held = 0;
    double worst_ratio = 0.0;
    for (const auto& s : samples) {
      held += s.holds;
      const double rhs = (s.kappa + 1) * (s.dist_cone + s.dist_st);
      if (rhs > 0) worst_ratio = std::max(worst_ratio, s.dist_splus / rhs);
    }
    ok = ok && held == 1000;
    detail += bases[b].first + " " + std::to_string(held) + "/1000 (max lhs/rhs " +
              fmt("%.3f", worst_ratio) + "); ";
  }
  // Rows (1,0), (0,1), (1/k,1/k) near the zero-row point [e1 e2; 0].
  Matrix xbar = Matrix::Zero(3, 2);
  xbar(0, 0) = xbar(1, 1) = 1.0;
  const double kap = kappa_unchecked(xbar);
  int violations = 0, family = 0;
  for (double k : {5.0, 10.0, 20.0, 50.0, 100.0, 1e3, 1e4}) {
    Matrix x(3, 2);
    x << 1, 0, 0, 1, 1 / k, 1 / k;
    ++family;
    violations += !evaluate_error_bound(x, kap).holds;
  }
  ok = ok && violations >= 1;
  const double secs = seconds_since(t0);
  ok = ok && secs < 60.0;
  detail += "zero-row family " + std::to_string(violations) + "/" + std::to_string(family) +
            " violate (kappa " + fmt("%.2f", kap) + "), " + fmt("%.2f s", secs);
  return {ok, detail};
}

// 7. Small QAPs against exhaustive enumeration.
Outcome small_qap() {
  const auto t0 = Clock::now();
  std::mt19937_64 gen(107);
  bool ok = true;
  int attained = 0, total = 0, instances_attained = 0;
  double worst_margin = std::numeric_limits<double>::infinity();
  for (int inst = 0; inst < 10; ++inst) {
    QapInstance q{"rand5_" + std::to_string(inst), 5, random_qap_matrix(5, gen),
                  random_qap_matrix(5, gen), std::nullopt};
    const double opt = oracle::qap_brute_force(q.a, q.b);
    auto f = std::make_shared<QapObjective>(q);
    g_qap_objectives.push_back(f);
    double best = std::numeric_limits<double>::infinity();
    for (int s = 0; s < 30; ++s) {
      const auto rep = seppg_solve(*f, random_stiefel_start(5, 5, start_seed(700 + inst, s)),
                                   PenaltyConfig::seppg_zero());
      record(rep, true);
      const Matrix p = round_to_feasible(rep.x_final.mat()).mat();
      const bool perm = oracle::is_permutation_matrix(p);
      ok = ok && perm;
      const double v = f->classical_value(p);
      best = std::min(best, v);
      ++total;
      if (std::abs(v - opt) <= 1e-9) ++attained;
      g_qap_reports.push_back(rep);
      g_qap_report_instance.push_back(g_qap_objectives.size() - 1);
    }
    worst_margin = std::min(worst_margin, best - opt);
    ok = ok && best >= opt - 1e-6;
    if (std::abs(best - opt) <= 1e-9) ++instances_attained;
  }
  const double secs = seconds_since(t0);
  ok = ok && secs < 300.0;
  return {ok, "10 instances x 30 starts, all rounded outputs permutations: " +
                  std::string(ok ? "yes" : "no") + ", min(best - optimum) " +
                  fmt("%g", worst_margin) + ", optimum attained in " +
                  std::to_string(attained) + "/" + std::to_string(total) + " starts and " +
                  std::to_string(instances_attained) + "/10 instances, " +
                  fmt("%.2f s", secs)};
}

// 8. Inner-solver trace invariants.
Outcome trace_invariants() {
  int traces = 0, converged = 0, bad_window = 0, bad_v = 0;
  for (const auto& [trace, cfg] : g_traces) {
    ++traces;
    const auto wm = trace.window_max_sequence(cfg.memory);
    for (std::size_t k = 1; k < wm.size(); ++k)
      if (wm[k] > wm[k - 1]) {
        ++bad_window;
        break;
      }
    if (!trace.iters.empty() && trace.iters.back().grad_norm <= cfg.grad_tol) {
      ++converged;
      if (!(trace.iters.back().v_norm <= cfg.t_max * cfg.grad_tol)) ++bad_v;
    }
  }
  return {traces > 0 && bad_window == 0 && bad_v == 0,
          std::to_string(traces) + " traces, window-max increases in " +
              std::to_string(bad_window) + ", final |V| bound violated in " +
              std::to_string(bad_v) + " of " + std::to_string(converged) + " converged"};
}

// 9. Stationarity of the small-QAP outputs.
Outcome qap_stationarity() {
  const double bound = 10 * PenaltyConfig::seppg_zero().tau_min;
  double worst_returned = 0.0, worst_raw = 0.0, worst_raw_vs_tau = 0.0;
  int raw_skipped = 0;
  for (std::size_t k = 0; k < g_qap_reports.size(); ++k) {
    const auto& rep = g_qap_reports[k];
    const auto& f = *g_qap_objectives[g_qap_report_instance[k]];
    const auto p = round_to_feasible(rep.x_final.mat());
    worst_returned = std::max(worst_returned, stationarity_residual(f, p));
    if (vartheta(rep.x_final.mat()) > 5e-6) {
      ++raw_skipped;
      continue;
    }
    const double raw = stationarity_residual(f, rep.x_final);
    worst_raw = std::max(worst_raw, raw);
    worst_raw_vs_tau = std::max(worst_raw_vs_tau, raw / rep.trace.back().tau);
  }
  const bool ok = !g_qap_reports.empty() && worst_returned <= bound && worst_raw_vs_tau <= 1.0;
  return {ok, std::to_string(g_qap_reports.size()) + " runs, max residual at returned " +
                  "permutation " + fmt("%.1e", worst_returned) + " (bound " +
                  fmt("%.0e", bound) + "); unrounded iterate: max " + fmt("%.1e", worst_raw) +
                  ", max residual/tau_l " + fmt("%.3f", worst_raw_vs_tau) +
                  (raw_skipped ? ", " + std::to_string(raw_skipped) + " skipped" : "")};
}

// 10. Clustering metrics and the planted factorization.
Outcome clustering() {
  const auto t0 = Clock::now();
  std::vector<int> truth;
  for (int i = 0; i < 30; ++i) truth.push_back(1 + i % 3);
  const auto perfect = clustering_metrics(truth, truth, 3);
  const bool exact = perfect.purity == 1.0 && perfect.entropy == 0.0 && perfect.nmi == 1.0;

  std::mt19937_64 gen(110);
  const auto planted = oracle::planted_clusters(30, 10, 3, gen);
  OnmfInstance inst{planted.a, 3};
  std::string detail = std::string("perfect labels (") + fmt("%g", perfect.purity) + ", " +
                       fmt("%g", perfect.entropy) + ", " + fmt("%g", perfect.nmi) + ")";
  bool ok = exact;
  for (SolverKind kind : {SolverKind::kSeppgPlus, SolverKind::kSeppgZero, SolverKind::kAlm}) {
    OnmfConfig cfg;
    cfg.solver = kind;
    cfg.penalty = kind == SolverKind::kSeppgPlus ? PenaltyConfig::seppg_plus()
                                                 : PenaltyConfig::seppg_zero();
    const auto res = onmf_alternate(inst, random_stiefel_start(30, 3, 11), cfg);
    g_orth_residuals.push_back(res.x.orth_residual());
    std::vector<int> pred = row_labels(res.x.mat());
    for (int& l : pred) ++l;
    const auto s = clustering_metrics(planted.labels, pred, 3);
    ok = ok && s.purity == 1.0;
    detail += "; planted 30x10 " + std::string(to_string(kind)) + " purity " +
              fmt("%g", s.purity) + " nmi " + fmt("%g", s.nmi);
  }
  const double secs = seconds_since(t0);
  ok = ok && secs < 30.0;
  return {ok, detail + ", " + fmt("%.2f s", secs)};
}

// 11. Byte-identical CSV output on repetition.
Outcome determinism() {
  std::mt19937_64 gen(111);
  std::vector<Problem> problems;
  problems.push_back(make_qap_problem(
      {"rand6", 6, random_qap_matrix(6, gen), random_qap_matrix(6, gen), 100.0}));
  problems.push_back(make_gm_problem(
      AffinityInstance::from_matrix(oracle::gaussian(16, 16, gen).cwiseAbs(), "gm4")));
  problems.push_back(make_proj_problem(oracle::gaussian(6, 3, gen), "proj63"));
  const auto planted = oracle::planted_clusters(12, 6, 3, gen);
  problems.push_back(make_onmf_problem({planted.a, 3}, planted.labels, "onmf12"));
  bool ok = true;
  int compared = 0;
  for (const auto& problem : problems) {
    for (SolverKind kind : {SolverKind::kSeppgPlus, SolverKind::kSeppgZero, SolverKind::kAlm}) {
      ExperimentSpec spec;
      spec.solver = kind;
      spec.penalty = kind == SolverKind::kSeppgPlus ? PenaltyConfig::seppg_plus()
                                                    : PenaltyConfig::seppg_zero();
      spec.num_starts = 4;
      spec.seed = 2024;
      spec.jobs = 2;
      std::string first;
      for (int rep = 0; rep < 2; ++rep) {
        const auto res = run_experiment(problem, spec);
        for (const auto& s : res.starts)
          if (s.ok) g_orth_residuals.push_back(s.orth);
        std::ostringstream os;
        write_summary_csv(os, res.summary, false);
        write_starts_csv(os, res.starts, false);
        if (rep == 0) {
          first = os.str();
        } else {
          ok = ok && os.str() == first;
          ++compared;
        }
      }
    }
  }
  return {ok, std::to_string(compared) + " experiment pairs (4 problem kinds x 3 solvers) " +
                  (ok ? "byte-identical" : "differ")};
}

// 3. Orthogonality of every solver output produced above.
Outcome orthogonality() {
  double worst = 0.0;
  for (double r : g_orth_residuals) worst = std::max(worst, r);
  return {!g_orth_residuals.empty() && worst <= 1e-10,
          std::to_string(g_orth_residuals.size()) + " solver outputs, max |X'X - I| " +
              fmt("%.1e", worst)};
}

}  // namespace

int main() {
  const std::map<int, std::pair<std::string, std::function<Outcome()>>> criteria = {
      {1, {"gradient correctness", gradients}},
      {2, {"prox/envelope closed forms", prox_grid}},
      {4, {"feasibility at exit (projection)", projection_feasibility}},
      {5, {"non-exactness sequence", example_sequence}},
      {6, {"error-bound sweep", error_bound}},
      {7, {"small-QAP oracle", small_qap}},
      {8, {"nonmonotone-solver invariants", trace_invariants}},
      {9, {"stationarity of small-QAP outputs", qap_stationarity}},
      {10, {"clustering metrics", clustering}},
      {11, {"determinism", determinism}},
      {3, {"orthogonality at exit", orthogonality}},
  };
  // Criterion 3 aggregates the runs of the others, so it is evaluated last.
  std::map<int, std::pair<std::string, Outcome>> results;
  for (int id : {1, 2, 4, 5, 6, 7, 8, 9, 10, 11, 3}) {
    const auto& [name, fn] = criteria.at(id);
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    results[id] = {name, o};
  }
  int failed = 0;
  for (const auto& [id, r] : results) {
    std::printf("criterion %2d: %s  %s: %s\n", id, r.second.pass ? "PASS" : "FAIL",
                r.first.c_str(), r.second.detail.c_str());
    failed += !r.second.pass;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(results.size()) - failed,
              results.size());
  return failed == 0 ? 0 : 1;
}
