#ifndef NNORTH_BENCH_HPP
#define NNORTH_BENCH_HPP

#include "nnorth/problems.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace nnorth {

// ---------------------------------------------------------------------------
// File formats

/// Parses a QAPLIB instance: n, then A and B row-major, whitespace separated.
/// Errors carry the byte offset of the offending token.
QapInstance parse_qaplib(std::istream& in, std::string name = {});
QapInstance parse_qaplib_file(const std::string& path);

/// Writes `inst` in QAPLIB layout (integers printed without a decimal point).
void emit_qaplib(std::ostream& os, const QapInstance& inst);

/// Looks up `name` in a best-known sidecar made of `name value` lines.
std::optional<double> read_best_known(std::istream& in, const std::string& name);
std::optional<double> read_best_known_file(const std::string& path,
                                           const std::string& name);

/// Dense matrix: one row per line, whitespace-separated entries.
Matrix read_dense_matrix(std::istream& in);
Matrix read_dense_matrix_file(const std::string& path);
void write_dense_matrix(std::ostream& os, const Matrix& m);

/// Integer labels, whitespace separated.
std::vector<int> read_labels_file(const std::string& path);

/// Formats with 17 significant digits.
std::string format_double(double v);

// ---------------------------------------------------------------------------
// Metrics

/// (f_final − best)/best × 100. Throws InputError when best == 0.
double relgap(double f_final, double best);

struct ClusteringScores {
  double purity = 0.0;
  double entropy = 0.0;
  double nmi = 0.0;
};

/// Purity, entropy and NMI of `pred` against `truth`; labels are 1..r.
/// Degenerate cases: Eidx is 0 when r == 1, NMI is 1 when both partitions
/// have zero entropy.
ClusteringScores clustering_metrics(const std::vector<int>& truth,
                                    const std::vector<int>& pred, int r);

double median(std::vector<double> v);

// ---------------------------------------------------------------------------
// Experiments

enum class ProblemKind { kQap, kGm, kProj, kOnmf };
std::string_view to_string(ProblemKind k);

struct ExperimentSpec {
  ProblemKind problem = ProblemKind::kQap;
  std::string instance_path;
  std::string best_known_path;  // QAP sidecar
  std::string labels_path;      // ONMF ground truth
  Index clusters = 0;           // ONMF r
  SolverKind solver = SolverKind::kSeppgZero;
  int num_starts = 1;
  std::uint64_t seed = 0;
  PenaltyConfig penalty = PenaltyConfig::seppg_zero();
  AlmConfig alm;
  std::optional<double> weight0;  // ρ₀ or μ₀
  int jobs = 1;
  bool timing = false;  // write wall-clock columns (breaks byte-identical output)

  void validate() const;
};

/// A loaded problem instance, independent of any file.
struct Problem {
  std::string name;
  ProblemKind kind = ProblemKind::kQap;
  Index rows = 0;
  Index cols = 0;
  std::shared_ptr<const Objective> objective;  // unset for ONMF
  std::optional<double> best_known;
  std::optional<OnmfInstance> onmf;
  std::vector<int> labels;  // ONMF ground truth, 1..r; may be empty
};

Problem make_qap_problem(QapInstance inst);
Problem make_gm_problem(AffinityInstance inst);
Problem make_proj_problem(Matrix c, std::string name = "proj");
Problem make_onmf_problem(OnmfInstance inst, std::vector<int> labels = {},
                          std::string name = "onmf");
Problem load_problem(const ExperimentSpec& spec);

/// Penalty/ALM settings with the solver preset applied and `overrides`
/// (key=value lines) on top.
void apply_config_overrides(std::istream& in, PenaltyConfig& penalty,
                            AlmConfig& alm, std::optional<double>& weight0);

struct StartRecord {
  int start = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  std::string stop;
  double f_final = 0.0;
  double f_rounded = 0.0;
  std::optional<double> gap;
  std::optional<double> rounded_gap;
  double ninf = 0.0;
  double orth = 0.0;
  double stationarity = 0.0;
  int outer_iters = 0;
  int inner_iters = 0;
  double time = 0.0;
  std::optional<ClusteringScores> scores;
  Matrix x_final;
};

struct MetricsRow {
  std::string instance;
  std::string solver;
  int starts = 0;
  int failures = 0;
  std::optional<double> min_gap;
  std::optional<double> median_gap;
  std::optional<double> rmed_gap;
  double min_f = 0.0;
  double mean_f = 0.0;
  double mean_ninf = 0.0;
  double mean_orth = 0.0;
  double mean_time = 0.0;
  std::optional<ClusteringScores> mean_scores;
};

struct ExperimentResult {
  MetricsRow summary;
  std::vector<StartRecord> starts;
};

/// Seed of start `i`: spec.seed XOR i.
std::uint64_t start_seed(std::uint64_t seed, int i);

ExperimentResult run_experiment(const Problem& problem, const ExperimentSpec& spec);

MetricsRow aggregate(const std::string& instance, const std::string& solver,
                     const std::vector<StartRecord>& starts);

void write_summary_csv(std::ostream& os, const MetricsRow& row, bool timing);
void write_starts_csv(std::ostream& os, const std::vector<StartRecord>& starts,
                      bool timing);

}  // namespace nnorth

#endif
