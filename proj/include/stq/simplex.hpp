#pragma once

#include "stq/types.hpp"

namespace stq {

/// Outcome of maximizing c^T x subject to A x <= b, x >= 0.
struct SimplexResult {
  enum class Status { optimal, infeasible, unbounded };
  Status status = Status::infeasible;
  double objective = 0.0;
  Vec x;
};

/// Dense two-phase tableau simplex with Bland's rule. Intended for the tiny
/// feasibility problems produced by certification (a handful of variables).
SimplexResult solve_simplex(const Mat& a, const Vec& b, const Vec& c);

} // namespace stq
