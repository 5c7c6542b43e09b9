#include "stq/simplex.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace stq {

namespace {

constexpr double kPivotTol = 1e-11;

// Pivot the tableau so that column `col` becomes basic in row `row`.
void pivot(Mat& t, std::vector<int>& basis, int row, int col) {
  t.row(row) /= t(row, col);
  for (Eigen::Index i = 0; i < t.rows(); ++i) {
    if (i == row) continue;
    const double factor = t(i, col);
    if (factor != 0.0) t.row(i) -= factor * t.row(row);
  }
  basis[static_cast<size_t>(row)] = col;
}

// Runs the simplex iteration on a tableau whose last row is the objective
// (maximization, reduced costs negated in the usual tableau convention) and
// whose last column is the RHS. Columns in [0, ncols) are eligible to enter
// unless blocked. Returns false on unboundedness.
bool iterate(Mat& t, std::vector<int>& basis, int ncols,
             const std::vector<bool>& blocked) {
  const int m = static_cast<int>(t.rows()) - 1;
  const int rhs = static_cast<int>(t.cols()) - 1;
  for (int iter = 0; iter < 10000; ++iter) {
    // Bland's rule: smallest-index column with positive reduced cost.
    int enter = -1;
    for (int j = 0; j < ncols; ++j) {
      if (blocked[static_cast<size_t>(j)]) continue;
      if (t(m, j) > kPivotTol) {
        enter = j;
        break;
      }
    }
    if (enter < 0) return true;
    int leave = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      if (t(i, enter) > kPivotTol) {
        const double ratio = t(i, rhs) / t(i, enter);
        if (ratio < best - kPivotTol ||
            (ratio < best + kPivotTol && leave >= 0 &&
             basis[static_cast<size_t>(i)] < basis[static_cast<size_t>(leave)])) {
          best = ratio;
          leave = i;
        }
      }
    }
    if (leave < 0) return false;
    pivot(t, basis, leave, enter);
  }
  throw std::runtime_error("solve_simplex: iteration limit exceeded");
}

} // namespace

SimplexResult solve_simplex(const Mat& a, const Vec& b, const Vec& c) {
  const int m = static_cast<int>(a.rows());
  const int n = static_cast<int>(a.cols());
  if (b.size() != m || c.size() != n) {
    throw std::invalid_argument("solve_simplex: dimension mismatch");
  }

  int n_art = 0;
  for (int i = 0; i < m; ++i) {
    if (b[i] < 0.0) ++n_art;
  }

  const int ncols = n + m + n_art;   // structural, slack, artificial
  Mat t = Mat::Zero(m + 1, ncols + 1);
  std::vector<int> basis(static_cast<size_t>(m), -1);

  int art = n + m;
  for (int i = 0; i < m; ++i) {
    if (b[i] >= 0.0) {
      t.block(i, 0, 1, n) = a.row(i);
      t(i, n + i) = 1.0;
      t(i, ncols) = b[i];
      basis[static_cast<size_t>(i)] = n + i;
    } else {
      t.block(i, 0, 1, n) = -a.row(i);
      t(i, n + i) = -1.0;
      t(i, art) = 1.0;
      t(i, ncols) = -b[i];
      basis[static_cast<size_t>(i)] = art;
      ++art;
    }
  }

  std::vector<bool> blocked(static_cast<size_t>(ncols), false);

  SimplexResult result;
  if (n_art > 0) {
    // Phase 1: maximize -(sum of artificials).
    for (int j = n + m; j < ncols; ++j) t(m, j) = -1.0;
    for (int i = 0; i < m; ++i) {
      if (basis[static_cast<size_t>(i)] >= n + m) t.row(m) += t.row(i);
    }
    if (!iterate(t, basis, ncols, blocked)) {
      throw std::runtime_error("solve_simplex: phase 1 reported unbounded");
    }
    // The objective row carries the negated value, so a positive residual
    // means the artificials could not be driven to zero.
    if (t(m, ncols) > 1e-9) {
      result.status = SimplexResult::Status::infeasible;
      return result;
    }
    // Drive any degenerate artificial out of the basis, then retire the
    // artificial columns.
    for (int i = 0; i < m; ++i) {
      if (basis[static_cast<size_t>(i)] >= n + m) {
        int col = -1;
        for (int j = 0; j < n + m; ++j) {
          if (std::abs(t(i, j)) > kPivotTol) {
            col = j;
            break;
          }
        }
        if (col >= 0) pivot(t, basis, i, col);
      }
    }
    for (int j = n + m; j < ncols; ++j) blocked[static_cast<size_t>(j)] = true;
  }

  // Phase 2 objective row.
  t.row(m).setZero();
  t.block(m, 0, 1, n) = c.transpose();
  for (int i = 0; i < m; ++i) {
    const int bj = basis[static_cast<size_t>(i)];
    if (bj < n && t(m, bj) != 0.0) t.row(m) -= t(m, bj) * t.row(i);
  }
  if (!iterate(t, basis, ncols, blocked)) {
    result.status = SimplexResult::Status::unbounded;
    return result;
  }

  result.status = SimplexResult::Status::optimal;
  result.x = Vec::Zero(n);
  for (int i = 0; i < m; ++i) {
    const int bj = basis[static_cast<size_t>(i)];
    if (bj >= 0 && bj < n) result.x[bj] = t(i, ncols);
  }
  result.objective = c.dot(result.x);
  return result;
}

} // namespace stq
