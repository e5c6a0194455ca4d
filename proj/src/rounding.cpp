#include "nnorth/outer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace nnorth {

namespace {

Matrix greedy_permutation(const Matrix& x) {
  const Index n = x.rows();
  std::vector<bool> row_used(n, false), col_used(n, false);
  Matrix p = Matrix::Zero(n, n);
  for (Index step = 0; step < n; ++step) {
    Index bi = -1, bj = -1;
    double best = -std::numeric_limits<double>::infinity();
    // Column-major scan; strict '>' keeps the first maximal entry.
    for (Index j = 0; j < n; ++j) {
      if (col_used[j]) continue;
      for (Index i = 0; i < n; ++i) {
        if (row_used[i]) continue;
        if (x(i, j) > best) {
          best = x(i, j);
          bi = i;
          bj = j;
        }
      }
    }
    row_used[bi] = true;
    col_used[bj] = true;
    p(bi, bj) = 1.0;
  }
  return p;
}

Matrix assign_and_normalize(const Matrix& x) {
  const Index n = x.rows();
  const Index r = x.cols();
  std::vector<Index> owner(n);
  for (Index i = 0; i < n; ++i) {
    Index best = 0;
    for (Index j = 1; j < r; ++j) {
      if (x(i, j) > x(i, best)) best = j;
    }
    owner[i] = best;
  }
  // kept(i) is the value row i contributes to its owner column.
  std::vector<double> kept(n);
  for (Index i = 0; i < n; ++i) kept[i] = std::max(x(i, owner[i]), 0.0);

  auto column_mass = [&](Index j) {
    double s = 0.0;
    for (Index i = 0; i < n; ++i) {
      if (owner[i] == j) s += kept[i] * kept[i];
    }
    return s;
  };
  // A positive donor must leave positive mass behind in its current column;
  // rows holding zero can always move.
  auto pick_donor = [&](Index empty, bool positive_only) {
    Index donor = -1;
    for (Index i = 0; i < n; ++i) {
      if (positive_only && (owner[i] == empty || kept[i] <= 0.0)) continue;
      if (kept[i] > 0.0 && column_mass(owner[i]) - kept[i] * kept[i] <= 0.0) continue;
      if (donor < 0 || x(i, empty) > x(donor, empty)) donor = i;
    }
    return donor;
  };

  for (Index pass = 0;; ++pass) {
    Index empty = -1;
    for (Index j = 0; j < r; ++j) {
      if (column_mass(j) == 0.0) {
        empty = j;
        break;
      }
    }
    if (empty < 0) break;
    if (pass >= n * r) {
      throw RoundingError("round_to_feasible: repair did not terminate");
    }
    Index donor = pick_donor(empty, true);
    if (donor < 0) donor = pick_donor(empty, false);
    if (donor < 0) {
      throw RoundingError("round_to_feasible: no row available to fill column " +
                          std::to_string(empty));
    }
    owner[donor] = empty;
    kept[donor] = x(donor, empty) > 0.0 ? x(donor, empty) : 1.0;
  }

  Matrix out = Matrix::Zero(n, r);
  for (Index i = 0; i < n; ++i) out(i, owner[i]) = kept[i];
  for (Index j = 0; j < r; ++j) out.col(j) /= out.col(j).norm();
  return out;
}

}  // namespace

bool is_nonneg_orthogonal(const Matrix& x, double tol) {
  if (x.cols() < 1 || x.rows() < x.cols()) return false;
  if ((x.array() < 0.0).any()) return false;
  for (Index i = 0; i < x.rows(); ++i) {
    if ((x.row(i).array() > 0.0).count() > 1) return false;
  }
  return orth_residual(x) <= tol;
}

StiefelPoint round_to_feasible(const Matrix& x) {
  require_valid_dense(x, "round_to_feasible");
  if (is_nonneg_orthogonal(x, 1e-14)) return StiefelPoint::certify(x);
  Matrix out = x.rows() == x.cols() ? greedy_permutation(x)
                                    : assign_and_normalize(x);
  return StiefelPoint::certify(std::move(out), 1e-12);
}

}  // namespace nnorth
