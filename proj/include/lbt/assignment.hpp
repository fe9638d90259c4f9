#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lbt/geometry.hpp"

namespace lbt {

/// Cost metric for tracklet/detection matching: 1 - IoU for KIOU-style
/// trackers, center distance in pixels for SORT-style trackers.
enum class CostMode { iou, euclidean };

/// Result of matching rows (tracklets) to columns (detections). The three
/// lists partition both index sets; no index appears twice.
struct Assignment {
  std::vector<std::pair<int, int>> matches;
  std::vector<int> unmatched_rows;
  std::vector<int> unmatched_cols;
};

inline Eigen::MatrixXd build_cost_matrix(const std::vector<GlobalBox>& rows,
                                         const std::vector<GlobalBox>& cols,
                                         CostMode mode) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(cols.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      m(i, j) = mode == CostMode::iou ? 1.0 - iou(rows[i], cols[j])
                                      : center_distance(rows[i], cols[j]);
    }
  }
  return m;
}

/// Sum of matched entries.
inline double assignment_cost(const Eigen::MatrixXd& costs, const Assignment& a) {
  double total = 0.0;
  for (const auto& [i, j] : a.matches) total += costs(i, j);
  return total;
}

namespace detail {

// Kuhn-Munkres with potentials, O(rows^2 * cols); requires rows <= cols.
// Returns row -> column of a min-cost complete matching of the rows.
inline std::vector<int> hungarian_row_to_col(const Eigen::MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  const int m = static_cast<int>(a.cols());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      int j1 = -1;
      double delta = inf;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= m; ++j) {
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  }
  return row_to_col;
}

inline Assignment gate_matches(const Eigen::MatrixXd& costs,
                               const std::vector<int>& row_to_col,
                               const std::vector<double>& row_gates) {
  const int rows = static_cast<int>(costs.rows());
  const int cols = static_cast<int>(costs.cols());
  Assignment out;
  std::vector<char> col_matched(cols, 0);
  for (int i = 0; i < rows; ++i) {
    const int j = row_to_col[i];
    if (j >= 0 && costs(i, j) <= row_gates[i]) {
      out.matches.emplace_back(i, j);
      col_matched[j] = 1;
    } else {
      out.unmatched_rows.push_back(i);
    }
  }
  for (int j = 0; j < cols; ++j) {
    if (!col_matched[j]) out.unmatched_cols.push_back(j);
  }
  return out;
}

}  // namespace detail

/// Global min-cost matching (Hungarian). Matches whose cost exceeds the
/// corresponding row gate are dissolved into unmatched on both sides.
inline Assignment solve_assignment(const Eigen::MatrixXd& costs,
                                   const std::vector<double>& row_gates) {
  const int rows = static_cast<int>(costs.rows());
  const int cols = static_cast<int>(costs.cols());
  if (static_cast<int>(row_gates.size()) != rows) {
    throw std::invalid_argument("solve_assignment: one gate per row required");
  }
  if (rows == 0 || cols == 0) {
    Assignment out;
    for (int i = 0; i < rows; ++i) out.unmatched_rows.push_back(i);
    for (int j = 0; j < cols; ++j) out.unmatched_cols.push_back(j);
    return out;
  }
  std::vector<int> row_to_col(rows, -1);
  if (rows <= cols) {
    row_to_col = detail::hungarian_row_to_col(costs);
  } else {
    const std::vector<int> col_to_row =
        detail::hungarian_row_to_col(costs.transpose());
    for (int j = 0; j < cols; ++j) {
      if (col_to_row[j] >= 0) row_to_col[col_to_row[j]] = j;
    }
  }
  return detail::gate_matches(costs, row_to_col, row_gates);
}

inline Assignment solve_assignment(const Eigen::MatrixXd& costs, double gate) {
  return solve_assignment(
      costs, std::vector<double>(static_cast<size_t>(costs.rows()), gate));
}

/// Exhaustive minimum over all injective assignments; the verification
/// oracle for solve_assignment. Ties resolved toward the lexicographically
/// smallest (row, col) matching. Intended for small instances only.
inline Assignment brute_force_assignment(const Eigen::MatrixXd& costs) {
  const int rows = static_cast<int>(costs.rows());
  const int cols = static_cast<int>(costs.cols());
  if (std::min(rows, cols) > 8) {
    throw std::invalid_argument("brute_force_assignment: min side must be <= 8");
  }
  if (rows == 0 || cols == 0) {
    Assignment out;
    for (int i = 0; i < rows; ++i) out.unmatched_rows.push_back(i);
    for (int j = 0; j < cols; ++j) out.unmatched_cols.push_back(j);
    return out;
  }

  const bool transposed = rows > cols;
  const Eigen::MatrixXd a = transposed ? costs.transpose() : costs;
  const int n = static_cast<int>(a.rows());
  const int m = static_cast<int>(a.cols());

  std::vector<int> current(n, -1), best;
  std::vector<char> used(m, 0);
  double best_total = std::numeric_limits<double>::infinity();

  // Depth-first over columns in ascending order, so the first optimum found
  // is the lexicographically smallest one.
  auto recurse = [&](auto&& self, int row, double total) -> void {
    if (row == n) {
      if (total < best_total) {
        best_total = total;
        best = current;
      }
      return;
    }
    for (int j = 0; j < m; ++j) {
      if (used[j]) continue;
      used[j] = 1;
      current[row] = j;
      self(self, row + 1, total + a(row, j));
      used[j] = 0;
    }
    current[row] = -1;
  };
  recurse(recurse, 0, 0.0);

  Assignment out;
  std::vector<char> col_matched(cols, 0);
  for (int i = 0; i < n; ++i) {
    const int j = best[i];
    if (transposed) {
      out.matches.emplace_back(j, i);
    } else {
      out.matches.emplace_back(i, j);
    }
  }
  std::sort(out.matches.begin(), out.matches.end());
  for (const auto& [i, j] : out.matches) col_matched[j] = 1;
  std::vector<char> row_matched(rows, 0);
  for (const auto& [i, j] : out.matches) row_matched[i] = 1;
  for (int i = 0; i < rows; ++i) {
    if (!row_matched[i]) out.unmatched_rows.push_back(i);
  }
  for (int j = 0; j < cols; ++j) {
    if (!col_matched[j]) out.unmatched_cols.push_back(j);
  }
  return out;
}

/// Greedy nearest-first matching, offered for ablation against the optimal
/// solver. Ties broken by lowest (row, col).
inline Assignment greedy_assignment(const Eigen::MatrixXd& costs,
                                    const std::vector<double>& row_gates) {
  const int rows = static_cast<int>(costs.rows());
  const int cols = static_cast<int>(costs.cols());
  Assignment out;
  std::vector<char> row_done(rows, 0), col_done(cols, 0);
  for (int step = 0; step < std::min(rows, cols); ++step) {
    int bi = -1, bj = -1;
    double bc = std::numeric_limits<double>::infinity();
    for (int i = 0; i < rows; ++i) {
      if (row_done[i]) continue;
      for (int j = 0; j < cols; ++j) {
        if (col_done[j]) continue;
        if (costs(i, j) <= row_gates[i] && costs(i, j) < bc) {
          bc = costs(i, j);
          bi = i;
          bj = j;
        }
      }
    }
    if (bi < 0) break;
    row_done[bi] = 1;
    col_done[bj] = 1;
    out.matches.emplace_back(bi, bj);
  }
  std::sort(out.matches.begin(), out.matches.end());
  for (int i = 0; i < rows; ++i) {
    if (!row_done[i]) out.unmatched_rows.push_back(i);
  }
  for (int j = 0; j < cols; ++j) {
    if (!col_done[j]) out.unmatched_cols.push_back(j);
  }
  return out;
}

inline Assignment greedy_assignment(const Eigen::MatrixXd& costs, double gate) {
  return greedy_assignment(
      costs, std::vector<double>(static_cast<size_t>(costs.rows()), gate));
}

}  // namespace lbt
