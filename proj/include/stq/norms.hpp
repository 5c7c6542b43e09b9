#pragma once

#include <stdexcept>

#include "stq/types.hpp"

namespace stq {

/// Exponent of an r-norm, r in [1, inf]. Infinity is a distinct variant,
/// not a sentinel float.
class Exponent {
 public:
  static Exponent one() { return Exponent(1.0, false); }
  static Exponent two() { return Exponent(2.0, false); }
  static Exponent finite(double r);
  static Exponent infinity() { return Exponent(0.0, true); }

  bool is_infinity() const { return infinite_; }
  double value() const;

 private:
  Exponent(double r, bool infinite) : r_(r), infinite_(infinite) {}
  double r_;
  bool infinite_;
};

/// Diagonally-weighted r-norm ||x||_{r,[theta]} = ||[theta] x||_r with
/// strictly positive weights theta.
struct WeightedNorm {
  Vec weights;
  Exponent exponent;

  WeightedNorm(Vec w, Exponent e);
  int dim() const { return static_cast<int>(weights.size()); }

  static WeightedNorm weighted_inf(Vec w) {
    return WeightedNorm(std::move(w), Exponent::infinity());
  }
};

double weighted_norm(const Vec& x, const WeightedNorm& nrm);

/// Off-diagonal entries replaced by absolute values, diagonal kept signed.
Mat metzler_majorant(const Mat& a);

/// Matrix measure with respect to ||.||_{inf,[theta]}: the max row sum of
/// [theta] A [theta]^-1 with the diagonal kept signed.
double weighted_inf_log_norm(const Mat& a, const Vec& theta);

/// Induced matrix norm for ||.||_{inf,[theta]}.
double weighted_inf_induced_norm(const Mat& a, const Vec& theta);

/// Smallest Gamma with ||x||_{inf,[theta_op]} <= Gamma ||x||_{inf,[theta_cl]}
/// for all x, i.e. max_i theta_op_i / theta_cl_i.
double gamma_constant(const Vec& theta_cl, const Vec& theta_op);

} // namespace stq
