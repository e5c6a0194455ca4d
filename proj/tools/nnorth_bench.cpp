// Benchmark driver for minimization over the nonnegative orthogonal set.
//
//   nnorth-bench [global options] qap  <instance.dat> [--best sidecar]
//   nnorth-bench [global options] gm   <K.txt>
//   nnorth-bench [global options] proj <C.txt>
//   nnorth-bench [global options] onmf <A.txt> --clusters r [--labels file]
//   nnorth-bench [global options] diag-errorbound (--base X.txt | --shape n,r)
//   nnorth-bench [global options] diag-sosc <qap|gm|proj> <file> [--at X.txt]

#include "nnorth/bench.hpp"
#include "nnorth/diagnostics.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

namespace {

using namespace nnorth;

struct GlobalOptions {
  std::string solver = "seppg_zero";
  int starts = 1;
  std::uint64_t seed = 0;
  std::string out;
  std::string config;
  std::string dump_x;
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  bool timing = false;
};

void fail(const std::string& kind, const std::string& message) {
  nlohmann::json j{{"error", kind}, {"message", message}};
  std::cerr << j.dump() << '\n';
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputError("cannot write '" + path + "'");
  return os;
}

void fill_solver_settings(const GlobalOptions& g, ExperimentSpec& spec) {
  spec.solver = parse_solver_kind(g.solver);
  spec.penalty = spec.solver == SolverKind::kSeppgPlus ? PenaltyConfig::seppg_plus()
                                                       : PenaltyConfig::seppg_zero();
  spec.alm = AlmConfig{};
  spec.num_starts = g.starts;
  spec.seed = g.seed;
  spec.jobs = g.jobs;
  spec.timing = g.timing;
  if (!g.config.empty()) {
    std::ifstream in(g.config);
    if (!in) throw InputError("cannot open config '" + g.config + "'");
    apply_config_overrides(in, spec.penalty, spec.alm, spec.weight0);
  }
}

void emit_experiment(const GlobalOptions& g, const ExperimentSpec& spec,
                     const Problem& problem) {
  const ExperimentResult res = run_experiment(problem, spec);
  if (g.out.empty()) {
    write_summary_csv(std::cout, res.summary, spec.timing);
  } else {
    auto os = open_out(g.out);
    write_summary_csv(os, res.summary, spec.timing);
    const std::filesystem::path p(g.out);
    const auto starts_path =
        (p.parent_path() / (p.stem().string() + "_starts.csv")).string();
    auto ss = open_out(starts_path);
    write_starts_csv(ss, res.starts, spec.timing);
  }
  if (!g.dump_x.empty()) {
    std::filesystem::create_directories(g.dump_x);
    for (const auto& s : res.starts) {
      if (!s.ok) continue;
      auto os = open_out((std::filesystem::path(g.dump_x) /
                          (problem.name + "_start" + std::to_string(s.start) + ".txt"))
                             .string());
      write_dense_matrix(os, s.x_final);
    }
  }
}

Matrix base_point_for_shape(Index n, Index r) {
  // Spread rows over columns round-robin so no row is zero.
  Matrix x = Matrix::Zero(n, r);
  for (Index i = 0; i < n; ++i) x(i, i % r) = 1.0;
  for (Index j = 0; j < r; ++j) x.col(j).normalize();
  return x;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Benchmarks and diagnostics for optimization over the nonnegative "
               "orthogonal set"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("--solver", g.solver, "seppg_plus | seppg_zero | alm")
      ->check(CLI::IsMember({"seppg_plus", "seppg_zero", "alm"}));
  app.add_option("--starts", g.starts, "number of random starting points")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", g.seed, "base seed; start i uses seed XOR i");
  app.add_option("--out", g.out, "summary CSV path (raw per-start CSV goes next to it)");
  app.add_option("--config", g.config, "key=value overrides of solver parameters");
  app.add_option("--jobs", g.jobs, "parallel workers")->check(CLI::PositiveNumber);
  app.add_option("--dump-x", g.dump_x, "directory for final points");
  app.add_flag("--timing", g.timing, "write wall-clock columns");
  app.fallthrough();

  std::string path, best, labels, at, kind;
  Index clusters = 0;
  auto* qap = app.add_subcommand("qap", "quadratic assignment (QAPLIB file)");
  qap->add_option("instance", path)->required()->check(CLI::ExistingFile);
  qap->add_option("--best", best, "best-known sidecar ('name value' lines)")
      ->check(CLI::ExistingFile);
  auto* gm = app.add_subcommand("gm", "graph matching (dense n^2 x n^2 affinity)");
  gm->add_option("affinity", path)->required()->check(CLI::ExistingFile);
  auto* proj = app.add_subcommand("proj", "projection onto the feasible set");
  proj->add_option("target", path)->required()->check(CLI::ExistingFile);
  auto* onmf = app.add_subcommand("onmf", "orthogonal nonnegative matrix factorization");
  onmf->add_option("data", path)->required()->check(CLI::ExistingFile);
  onmf->add_option("--clusters", clusters)->required()->check(CLI::PositiveNumber);
  onmf->add_option("--labels", labels, "ground-truth labels 1..r")
      ->check(CLI::ExistingFile);

  std::string base, shape;
  double delta = 0.05;
  int samples = 1000;
  bool unchecked = false;
  auto* deb = app.add_subcommand("diag-errorbound", "sample the local error bound");
  deb->add_option("--base", base, "feasible base point file")->check(CLI::ExistingFile);
  deb->add_option("--shape", shape, "n,r for a generated base point");
  deb->add_option("--delta", delta)->check(CLI::PositiveNumber);
  deb->add_option("--samples", samples)->check(CLI::PositiveNumber);
  deb->add_flag("--unchecked", unchecked, "skip the zero-row hypothesis check");

  int dirs = 1000;
  auto* sosc = app.add_subcommand("diag-sosc", "sampled second-order check");
  sosc->add_option("kind", kind)->required()->check(CLI::IsMember({"qap", "gm", "proj"}));
  sosc->add_option("instance", path)->required()->check(CLI::ExistingFile);
  sosc->add_option("--at", at, "point to probe (default: rounded solver output)")
      ->check(CLI::ExistingFile);
  sosc->add_option("--dirs", dirs)->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    fail("usage", e.what());
    return 1;
  }

  try {
    ExperimentSpec spec;
    fill_solver_settings(g, spec);
    spec.instance_path = path;
    if (*qap || *gm || *proj || *onmf) {
      spec.problem = *qap ? ProblemKind::kQap
                   : *gm  ? ProblemKind::kGm
                   : *proj ? ProblemKind::kProj
                           : ProblemKind::kOnmf;
      spec.best_known_path = best;
      spec.labels_path = labels;
      spec.clusters = clusters;
      spec.validate();
      emit_experiment(g, spec, load_problem(spec));
    } else if (*deb) {
      Matrix xbar;
      if (!base.empty()) {
        xbar = read_dense_matrix_file(base);
      } else {
        const auto comma = shape.find(',');
        if (comma == std::string::npos) throw InputError("--shape expects n,r");
        xbar = base_point_for_shape(std::stol(shape.substr(0, comma)),
                                    std::stol(shape.substr(comma + 1)));
      }
      const auto out = error_bound_sweep(xbar, delta, samples, g.seed, !unchecked);
      if (g.out.empty()) {
        write_error_bound_csv(std::cout, out);
      } else {
        auto os = open_out(g.out);
        write_error_bound_csv(os, out);
      }
    } else if (*sosc) {
      spec.problem = kind == "qap" ? ProblemKind::kQap
                   : kind == "gm"  ? ProblemKind::kGm
                                   : ProblemKind::kProj;
      const Problem problem = load_problem(spec);
      Matrix xbar;
      if (!at.empty()) {
        xbar = read_dense_matrix_file(at);
      } else {
        const StiefelPoint x0 = random_stiefel_start(problem.rows, problem.cols, g.seed);
        const SolveReport rep = run_solver(spec.solver, *problem.objective, x0,
                                           spec.penalty, spec.alm, spec.weight0);
        xbar = round_to_feasible(rep.x_final.mat()).mat();
      }
      const SoscReport rep = sosc_probe(*problem.objective,
                                        StiefelPoint::certify(xbar), dirs, g.seed);
      std::ostream* os = &std::cout;
      std::ofstream file;
      if (!g.out.empty()) {
        file = open_out(g.out);
        os = &file;
      }
      *os << "sampled,surviving,min_value,inconclusive,strictly_positive\n"
          << rep.sampled << ',' << rep.surviving << ',' << format_double(rep.min_value)
          << ',' << (rep.inconclusive ? 1 : 0) << ',' << (rep.strictly_positive ? 1 : 0)
          << '\n';
    }
  } catch (const Error& e) {
    fail(e.kind(), e.what());
    return 1;
  } catch (const std::exception& e) {
    fail("internal", e.what());
    return 1;
  }
  return 0;
}
