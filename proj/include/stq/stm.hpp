#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "stq/certify.hpp"
#include "stq/integrate.hpp"
#include "stq/quantize.hpp"

namespace stq {

/// Why a sampling decision fired.
enum class TriggerCause { threshold, ball_exit, max_time };

const char* to_string(TriggerCause cause);

/// nu(t) = d2 (e^{d1 t} - 1)/d1, continued as d2 t at d1 = 0. Strictly
/// increasing with nu(0) = 0.
double nu(double t, double d1, double d2);

/// Solution of lambda (1 + nu(t)) = 1: the horizon on which predictions
/// started in the lambda-scaled ball are guaranteed to stay in range.
double tilde_tau_min(double lambda, double d1, double d2);

/// Smallest inter-sampling time enforceable by the logarithmic-scheme
/// threshold; requires the density/threshold compatibility
/// Gamma L_op (1-rho)/(1+rho) < sigma.
double tau_min_log(double rho, double sigma, const Certificate& cert);

/// (lower, upper) admissible window for the threshold parameter sigma at a
/// given quantization density. Stabilizable iff lower < upper.
std::pair<double, double> sigma_bounds_log(double rho,
                                           const Certificate& cert);

/// Guaranteed exponential decay rate of the logarithmic scheme.
double gamma_log(double sigma, double sigma1, double c, double tau_max);

/// (lower, upper) admissible window for sigma in the zooming scheme at
/// period h; errors if h exceeds the prediction-safe horizon.
std::pair<double, double> sigma_bounds_zoom(double h, const ZoomQuantizer& q,
                                            const Certificate& cert);

/// Zoom-parameter update over an elapsed interval; strictly decreasing for
/// delta_t > 0. Requires alpha sigma / c < 1.
double zoom_update(double mu, double delta_t, const Certificate& cert,
                   double sigma);

/// Guaranteed exponential decay rate of the zooming scheme.
double gamma_zoom(double sigma, const Certificate& cert, int ell_max,
                  double h);

struct StmLogConfig {
  double sigma = 0.0;
  double tau_max = 0.0;
  double lambda = 0.0;
  /// Optional discretization set of allowed inter-sampling times (sorted
  /// ascending); decisions are floored onto it.
  std::optional<std::vector<double>> allowed_times;
  double dt_pred = 1e-4;

  void validate(const LogQuantizer& quant, const Certificate& cert) const;
};

struct LogDecision {
  double tau = 0.0;
  TriggerCause cause = TriggerCause::max_time;
};

/// Next inter-sampling time from the quantized sample: predicts the held
/// trajectory from q, stops at the earlier of the range exit
/// (||x_q||_op >= R2), the threshold crossing
/// (L_op(1-rho)/(1+rho) e^{d1 tau} ||q||_op + ||x_q(tau)-q||_op
///  > sigma ||q||_cl), or tau_max. Crossings are located on the prediction
/// grid and refined by bisection to 1e-7 s on the interpolated trajectory.
LogDecision next_time_log(const Plant& p, const Vec& q,
                          const Certificate& cert, const LogQuantizer& quant,
                          const StmLogConfig& cfg);

struct StmZoomConfig {
  double sigma = 0.0;
  double h = 0.0;
  int ell_max = 0;
  double dt_pred = 1e-4;

  void validate(const ZoomQuantizer& quant, const Certificate& cert) const;
};

struct ZoomDecision {
  int ell = 1;
  TriggerCause cause = TriggerCause::max_time;
  /// Set when the threshold was already crossed at the first instant past h;
  /// the decision degenerates to one period.
  bool immediate = false;
};

/// Next step count for the zooming scheme: conditions are scanned for
/// tau > h only, crossing times are floored onto the period grid, and
/// 1 <= ell <= ell_max always holds.
ZoomDecision next_steps_zoom(const Plant& p, const Vec& q, double mu,
                             const Certificate& cert, const ZoomQuantizer& quant,
                             const StmZoomConfig& cfg);

} // namespace stq
