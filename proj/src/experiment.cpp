#include "nnorth/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

namespace nnorth {

std::string_view to_string(ProblemKind k) {
  switch (k) {
    case ProblemKind::kQap: return "qap";
    case ProblemKind::kGm: return "gm";
    case ProblemKind::kProj: return "proj";
    case ProblemKind::kOnmf: return "onmf";
  }
  return "unknown";
}

void ExperimentSpec::validate() const {
  if (num_starts < 1) throw InputError("experiment: num_starts must be >= 1");
  if (jobs < 1) throw InputError("experiment: jobs must be >= 1");
  if (problem == ProblemKind::kOnmf && clusters < 1) {
    throw InputError("experiment: ONMF needs a cluster count >= 1");
  }
  penalty.validate();
}

Problem make_qap_problem(QapInstance inst) {
  Problem p;
  p.name = inst.name.empty() ? "qap" : inst.name;
  p.kind = ProblemKind::kQap;
  p.rows = p.cols = inst.n;
  p.best_known = inst.best_known;
  p.objective = std::make_shared<QapObjective>(std::move(inst));
  return p;
}

Problem make_gm_problem(AffinityInstance inst) {
  Problem p;
  p.name = inst.name.empty() ? "gm" : inst.name;
  p.kind = ProblemKind::kGm;
  p.rows = p.cols = inst.n;
  p.objective = std::make_shared<GraphMatchingObjective>(std::move(inst));
  return p;
}

Problem make_proj_problem(Matrix c, std::string name) {
  Problem p;
  p.name = std::move(name);
  p.kind = ProblemKind::kProj;
  p.rows = c.rows();
  p.cols = c.cols();
  p.objective = std::make_shared<ProjectionObjective>(std::move(c));
  return p;
}

Problem make_onmf_problem(OnmfInstance inst, std::vector<int> labels,
                          std::string name) {
  inst.validate();
  if (!labels.empty() && labels.size() != static_cast<std::size_t>(inst.a.rows())) {
    throw InputError("ONMF labels: expected one label per row of A");
  }
  Problem p;
  p.name = std::move(name);
  p.kind = ProblemKind::kOnmf;
  p.rows = inst.a.rows();
  p.cols = inst.r;
  p.labels = std::move(labels);
  p.onmf = std::move(inst);
  return p;
}

namespace {

std::string stem_of(const std::string& path) {
  auto slash = path.find_last_of("/\\");
  std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
  auto dot = base.find_last_of('.');
  return dot == std::string::npos ? base : base.substr(0, dot);
}

}  // namespace

Problem load_problem(const ExperimentSpec& spec) {
  switch (spec.problem) {
    case ProblemKind::kQap: {
      QapInstance inst = parse_qaplib_file(spec.instance_path);
      if (!spec.best_known_path.empty()) {
        inst.best_known = read_best_known_file(spec.best_known_path, inst.name);
      }
      return make_qap_problem(std::move(inst));
    }
    case ProblemKind::kGm:
      return make_gm_problem(AffinityInstance::from_matrix(
          read_dense_matrix_file(spec.instance_path), stem_of(spec.instance_path)));
    case ProblemKind::kProj:
      return make_proj_problem(read_dense_matrix_file(spec.instance_path),
                               stem_of(spec.instance_path));
    case ProblemKind::kOnmf: {
      OnmfInstance inst{read_dense_matrix_file(spec.instance_path), spec.clusters};
      std::vector<int> labels;
      if (!spec.labels_path.empty()) labels = read_labels_file(spec.labels_path);
      return make_onmf_problem(std::move(inst), std::move(labels),
                               stem_of(spec.instance_path));
    }
  }
  throw InputError("unknown problem kind");
}

void apply_config_overrides(std::istream& in, PenaltyConfig& penalty,
                            AlmConfig& alm, std::optional<double>& weight0) {
  std::map<std::string, double*> reals{
      {"gamma", &penalty.gamma},
      {"c0", &penalty.c0},
      {"rho_max", &penalty.rho_max},
      {"sigma_rho_small", &penalty.sigma_rho_small},
      {"sigma_rho_large", &penalty.sigma_rho_large},
      {"tau0", &penalty.tau0},
      {"tau_min", &penalty.tau_min},
      {"sigma_tau", &penalty.sigma_tau},
      {"epsilon", &penalty.epsilon},
      {"rho_feas_threshold", &penalty.rho_feas_threshold},
      {"pgm.eta", &penalty.pgm.eta},
      {"pgm.alpha", &penalty.pgm.alpha},
      {"pgm.t_min", &penalty.pgm.t_min},
      {"pgm.t_max", &penalty.pgm.t_max},
      {"alm.growth", &alm.growth},
      {"alm.epsilon", &alm.epsilon},
      {"alm.grad_tol", &alm.pgm.grad_tol},
  };
  std::map<std::string, int*> ints{
      {"l_max", &penalty.l_max},
      {"pgm.memory", &penalty.pgm.memory},
      {"pgm.max_iters", &penalty.pgm.max_iters},
      {"pgm.max_backtracks", &penalty.pgm.max_backtracks},
      {"alm.max_outer", &alm.max_outer},
      {"alm.max_iters", &alm.pgm.max_iters},
  };

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InputError("config line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(val, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != val.size()) {
      throw InputError("config line " + std::to_string(line_no) + ": bad value '" +
                       val + "'");
    }
    if (key == "rho0") {
      penalty.rho0 = v;
    } else if (key == "weight0" || key == "mu0") {
      weight0 = v;
    } else if (auto r = reals.find(key); r != reals.end()) {
      *r->second = v;
    } else if (auto i = ints.find(key); i != ints.end()) {
      if (v != std::floor(v)) {
        throw InputError("config line " + std::to_string(line_no) + ": '" + key +
                         "' must be an integer");
      }
      *i->second = static_cast<int>(v);
    } else {
      throw InputError("config line " + std::to_string(line_no) + ": unknown key '" +
                       key + "'");
    }
  }
  alm.pgm.eta = penalty.pgm.eta;
  alm.pgm.alpha = penalty.pgm.alpha;
  alm.pgm.memory = penalty.pgm.memory;
  alm.pgm.t_min = penalty.pgm.t_min;
  alm.pgm.t_max = penalty.pgm.t_max;
  alm.pgm.max_backtracks = penalty.pgm.max_backtracks;
}

std::uint64_t start_seed(std::uint64_t seed, int i) {
  return seed ^ static_cast<std::uint64_t>(i);
}

namespace {

StartRecord run_one(const Problem& problem, const ExperimentSpec& spec, int i) {
  using Clock = std::chrono::steady_clock;
  StartRecord rec;
  rec.start = i;
  rec.seed = start_seed(spec.seed, i);
  const auto t0 = Clock::now();
  try {
    const StiefelPoint x0 = random_stiefel_start(problem.rows, problem.cols, rec.seed);
    if (problem.kind == ProblemKind::kOnmf) {
      OnmfConfig cfg;
      cfg.solver = spec.solver;
      cfg.penalty = spec.penalty;
      cfg.alm = spec.alm;
      cfg.weight0 = spec.weight0;
      OnmfResult res = onmf_alternate(*problem.onmf, x0, cfg);
      rec.x_final = res.x.mat();
      rec.f_final = res.history.empty()
                        ? (problem.onmf->a - res.x.mat() * res.y.transpose()).squaredNorm()
                        : res.history.back();
      rec.inner_iters = res.inner_iters_total;
      rec.outer_iters = static_cast<int>(res.history.size());
      rec.stop = "alternations";
      rec.stationarity = 0.0;
      const StiefelPoint rounded = round_to_feasible(res.x.mat());
      const Matrix y = onmf_update_y(problem.onmf->a, rounded.mat());
      rec.f_rounded = (problem.onmf->a - rounded.mat() * y.transpose()).squaredNorm();
      if (!problem.labels.empty()) {
        std::vector<int> pred = row_labels(res.x.mat());
        for (int& p : pred) ++p;
        rec.scores = clustering_metrics(problem.labels, pred,
                                        static_cast<int>(problem.cols));
      }
    } else {
      const SolveReport rep = run_solver(spec.solver, *problem.objective, x0,
                                         spec.penalty, spec.alm, spec.weight0);
      rec.x_final = rep.x_final.mat();
      rec.f_final = rep.f_final;
      rec.stationarity = rep.stationarity;
      rec.outer_iters = rep.outer_iters;
      rec.inner_iters = rep.inner_iters_total;
      rec.stop = std::string(to_string(rep.stop));
      const StiefelPoint rounded = round_to_feasible(rep.x_final.mat());
      rec.f_rounded = problem.objective->value(rounded.mat());
      if (problem.best_known) {
        rec.gap = relgap(rec.f_final, *problem.best_known);
        rec.rounded_gap = relgap(rec.f_rounded, *problem.best_known);
      }
    }
    rec.ninf = vartheta(rec.x_final);
    rec.orth = orth_residual(rec.x_final);
    rec.ok = true;
  } catch (const Error& e) {
    rec.ok = false;
    rec.error = e.kind() + ": " + e.what();
  }
  rec.time = std::chrono::duration<double>(Clock::now() - t0).count();
  return rec;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / double(v.size());
}

}  // namespace

ExperimentResult run_experiment(const Problem& problem, const ExperimentSpec& spec) {
  spec.validate();
  std::vector<StartRecord> records(spec.num_starts);
  const int workers = std::min(spec.jobs, spec.num_starts);
  if (workers <= 1) {
    for (int i = 0; i < spec.num_starts; ++i) records[i] = run_one(problem, spec, i);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int i = next++; i < spec.num_starts; i = next++) {
          records[i] = run_one(problem, spec, i);
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  ExperimentResult res;
  res.summary = aggregate(problem.name, std::string(to_string(spec.solver)), records);
  res.starts = std::move(records);
  return res;
}

MetricsRow aggregate(const std::string& instance, const std::string& solver,
                     const std::vector<StartRecord>& starts) {
  MetricsRow row;
  row.instance = instance;
  row.solver = solver;
  row.starts = static_cast<int>(starts.size());
  std::vector<double> gaps, rgaps, fs, ninf, orth, times;
  std::vector<ClusteringScores> scores;
  for (const auto& s : starts) {
    if (!s.ok) {
      ++row.failures;
      continue;
    }
    if (s.gap) gaps.push_back(*s.gap);
    if (s.rounded_gap) rgaps.push_back(*s.rounded_gap);
    if (s.scores) scores.push_back(*s.scores);
    fs.push_back(s.f_final);
    ninf.push_back(s.ninf);
    orth.push_back(s.orth);
    times.push_back(s.time);
  }
  if (!gaps.empty()) {
    row.min_gap = *std::min_element(gaps.begin(), gaps.end());
    row.median_gap = median(gaps);
  }
  if (!rgaps.empty()) row.rmed_gap = median(rgaps);
  if (!fs.empty()) row.min_f = *std::min_element(fs.begin(), fs.end());
  row.mean_f = mean_of(fs);
  row.mean_ninf = mean_of(ninf);
  row.mean_orth = mean_of(orth);
  row.mean_time = mean_of(times);
  if (!scores.empty()) {
    ClusteringScores m;
    for (const auto& s : scores) {
      m.purity += s.purity;
      m.entropy += s.entropy;
      m.nmi += s.nmi;
    }
    const double k = double(scores.size());
    row.mean_scores = ClusteringScores{m.purity / k, m.entropy / k, m.nmi / k};
  }
  return row;
}

namespace {

std::string opt(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string{};
}

}  // namespace

void write_summary_csv(std::ostream& os, const MetricsRow& row, bool timing) {
  os << "instance,solver,starts,failures,min_gap,median_gap,rmed_gap,min_f,mean_f,"
        "mean_ninf,mean_orth,mean_time,purity,entropy,nmi\n";
  os << row.instance << ',' << row.solver << ',' << row.starts << ','
     << row.failures << ',' << opt(row.min_gap) << ',' << opt(row.median_gap)
     << ',' << opt(row.rmed_gap) << ',' << format_double(row.min_f) << ','
     << format_double(row.mean_f) << ',' << format_double(row.mean_ninf) << ','
     << format_double(row.mean_orth) << ','
     << (timing ? format_double(row.mean_time) : std::string{});
  if (row.mean_scores) {
    os << ',' << format_double(row.mean_scores->purity) << ','
       << format_double(row.mean_scores->entropy) << ','
       << format_double(row.mean_scores->nmi);
  } else {
    os << ",,,";
  }
  os << '\n';
}

void write_starts_csv(std::ostream& os, const std::vector<StartRecord>& starts,
                      bool timing) {
  os << "start,seed,ok,stop,f_final,f_rounded,gap,rounded_gap,ninf,orth,"
        "stationarity,outer_iters,inner_iters,time,purity,entropy,nmi,error\n";
  for (const auto& s : starts) {
    os << s.start << ',' << s.seed << ',' << (s.ok ? 1 : 0) << ',' << s.stop << ',';
    if (s.ok) {
      os << format_double(s.f_final) << ',' << format_double(s.f_rounded) << ','
         << opt(s.gap) << ',' << opt(s.rounded_gap) << ',' << format_double(s.ninf)
         << ',' << format_double(s.orth) << ',' << format_double(s.stationarity)
         << ',' << s.outer_iters << ',' << s.inner_iters << ',';
    } else {
      os << ",,,,,,,,,";
    }
    os << (timing ? format_double(s.time) : std::string{}) << ',';
    if (s.scores) {
      os << format_double(s.scores->purity) << ',' << format_double(s.scores->entropy)
         << ',' << format_double(s.scores->nmi);
    } else {
      os << ",,";
    }
    std::string err = s.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    os << ',' << err << '\n';
  }
}

}  // namespace nnorth
