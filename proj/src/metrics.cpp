#include "nnorth/bench.hpp"

#include <algorithm>
#include <cmath>

namespace nnorth {

double relgap(double f_final, double best) {
  if (best == 0.0) throw InputError("relgap: best-known value is zero");
  return (f_final - best) / best * 100.0;
}

double median(std::vector<double> v) {
  if (v.empty()) throw InputError("median of an empty sample");
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

ClusteringScores clustering_metrics(const std::vector<int>& truth,
                                    const std::vector<int>& pred, int r) {
  if (r < 1) throw InputError("clustering_metrics: r must be >= 1");
  if (truth.size() != pred.size() || truth.empty()) {
    throw InputError("clustering_metrics: label vectors must be nonempty and of equal length");
  }
  const auto rr = static_cast<std::size_t>(r);
  // counts[i][j] = |truth cluster i ∩ predicted cluster j|
  std::vector<std::vector<double>> counts(rr, std::vector<double>(rr, 0.0));
  for (std::size_t k = 0; k < truth.size(); ++k) {
    if (truth[k] < 1 || truth[k] > r || pred[k] < 1 || pred[k] > r) {
      throw InputError("clustering_metrics: label out of range 1.." + std::to_string(r));
    }
    counts[truth[k] - 1][pred[k] - 1] += 1.0;
  }
  const double n = static_cast<double>(truth.size());
  std::vector<double> truth_size(rr, 0.0), pred_size(rr, 0.0);
  for (std::size_t i = 0; i < rr; ++i) {
    for (std::size_t j = 0; j < rr; ++j) {
      truth_size[i] += counts[i][j];
      pred_size[j] += counts[i][j];
    }
  }

  ClusteringScores s;
  double purity = 0.0;
  for (std::size_t j = 0; j < rr; ++j) {
    double best = 0.0;
    for (std::size_t i = 0; i < rr; ++i) best = std::max(best, counts[i][j]);
    purity += best;
  }
  s.purity = purity / n;

  double ent = 0.0;
  double mutual = 0.0;
  for (std::size_t i = 0; i < rr; ++i) {
    for (std::size_t j = 0; j < rr; ++j) {
      const double c = counts[i][j];
      if (c == 0.0) continue;
      ent += c * std::log2(c / pred_size[j]);
      mutual += c / n * std::log2((n / truth_size[i]) * (c / pred_size[j]));
    }
  }
  s.entropy = r > 1 ? -ent / (n * std::log2(double(r))) : 0.0;
  // -0.0 from an exact zero sum
  if (s.entropy == 0.0) s.entropy = 0.0;

  auto entropy_of = [&](const std::vector<double>& sizes) {
    double h = 0.0;
    for (double c : sizes) {
      if (c > 0.0) h += c / n * std::log2(n / c);
    }
    return h;
  };
  const double hmax = std::max(entropy_of(truth_size), entropy_of(pred_size));
  s.nmi = hmax > 0.0 ? mutual / hmax : 1.0;
  return s;
}

}  // namespace nnorth
