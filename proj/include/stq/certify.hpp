#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "stq/norms.hpp"
#include "stq/plant.hpp"
#include "stq/types.hpp"

namespace stq {

/// All constants needed by the quantizer/STM design and the stability
/// checks. Working norms are the diagonally-weighted infinity norms given by
/// theta_cl and theta_op; the L constants stay 1 unless the user declares
/// different ambient norms.
struct Certificate {
  double c = 0.0;          // closed-loop contraction rate
  double d1 = 0.0;         // open-loop growth rate
  double d2 = 0.0;         // open-loop gain at the held sample
  Vec theta_cl;
  Vec theta_op;
  double kappa_min = 0.0;
  double kappa_max = 0.0;
  double R0 = 0.0;
  double R1 = 0.0;
  double R2 = 0.0;
  double Gamma = 1.0;
  double R = 0.0;          // min{R1, R2/Gamma}
  double alpha = 0.0;      // measurement-error gain
  double sigma0 = 1.0;     // error-ball coefficient, arbitrary by design
  double L_cl = 1.0;
  double L_op = 1.0;
  double L_cl2 = 1.0;

  double norm_cl(const Vec& x) const {
    return weighted_norm(x, WeightedNorm::weighted_inf(theta_cl));
  }
  double norm_op(const Vec& x) const {
    return weighted_norm(x, WeightedNorm::weighted_inf(theta_op));
  }
  double kappa_abs() const {
    return std::max(std::abs(kappa_min), std::abs(kappa_max));
  }
};

struct CertificationError : std::runtime_error {
  CertificationError(std::string stage_, const std::string& what_)
      : std::runtime_error(what_), stage(std::move(stage_)) {}
  std::string stage;
};

struct KappaOptions {
  /// Outward rounding of the slope bounds; nullopt keeps full precision.
  std::optional<int> round_decimals = 2;
  int samples = 4096;
};

/// (inf, sup) of phi' over (-R0, R0) by dense sampling plus endpoint limits,
/// outward-rounded per options.
std::pair<double, double> kappa_bounds(
    const std::function<double(double)>& phi_prime, double R0,
    const KappaOptions& opts = {});

/// Feasibility report for a candidate weight vector against the Metzler
/// row inequalities ceil(M) v <= -rate v (v = theta^-1 elementwise).
struct ThetaFeasibility {
  bool feasible = false;
  double min_slack = 0.0;
  std::vector<double> slacks;  // one per (matrix, row), row-major
};

/// Direct-substitution check of theta against every matrix in the list.
ThetaFeasibility verify_theta(const std::vector<Mat>& mats, double rate,
                              const Vec& theta);

/// Searches for v > 0 with ceil(M)_Mzr v <= -rate v elementwise for every M
/// (rate = c for the closed loop, -d1 for the open loop), normalized v1 = 1.
/// Returns nullopt when infeasible. The returned v is re-verified by direct
/// substitution with slack >= -1e-12 before being accepted.
std::optional<Vec> lp_feasible_theta(const std::vector<Mat>& mats,
                                     double rate);

struct CertifyOptions {
  std::optional<Vec> theta_cl;  // verified instead of solved when given
  std::optional<Vec> theta_op;
  KappaOptions kappa;
  double sigma0 = 1.0;
};

/// Closed-loop and open-loop endpoint matrices entering the two LPs.
std::vector<Mat> closed_loop_matrices(const LurePlant& p, double kappa_min,
                                      double kappa_max);
std::vector<Mat> open_loop_matrices(const LurePlant& p, double kappa_min,
                                    double kappa_max);

Certificate certify_lure(const LurePlant& p, double c, double d1,
                         const CertifyOptions& opts = {});

/// Bisection for the largest contraction rate c with a feasible closed-loop
/// weighting. Convenience only; no joint optimization over theta.
double max_feasible_contraction_rate(const LurePlant& p,
                                     const KappaOptions& kappa = {},
                                     double hi = 100.0, double tol = 1e-6);

} // namespace stq
