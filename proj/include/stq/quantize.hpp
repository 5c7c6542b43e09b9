#pragma once

#include <optional>

#include "stq/certify.hpp"
#include "stq/types.hpp"

namespace stq {

/// Logarithmic quantizer with density rho and per-coordinate base levels
/// chi_{i,0} = chi0 / theta_cl_i. Cells are [chi_{i,j+1}, chi_{i,j}) with
/// chi_{i,j} = rho^j chi_{i,0}; each cell maps to its midpoint, zero maps to
/// zero, negative inputs by odd symmetry.
class LogQuantizer {
 public:
  LogQuantizer(double rho, double chi0, Vec theta_cl);

  /// Validates the base-level window R/L_cl2 <= chi0 < 2R/(L_cl2 (1+rho))
  /// against the certificate; defaults chi0 to the window's lower end.
  static LogQuantizer design(double rho, const Certificate& cert,
                             std::optional<double> chi0 = std::nullopt);

  Vec quantize(const Vec& x) const;
  double quantize_scalar(double z, int coord) const;

  double rho() const { return rho_; }
  double chi0() const { return chi0_; }
  const Vec& theta_cl() const { return theta_cl_; }
  double level(int coord, long j) const;  // chi_{i,j}

 private:
  double rho_;
  double chi0_;
  Vec theta_cl_;
};

/// lambda0 = (1+rho) L_cl2 chi0 / (2R); any lambda in (lambda0, 1) confines
/// quantized values of B_cl(R/L_cl) to B_cl(lambda R).
double lambda0_log(const LogQuantizer& q, const Certificate& cert);

/// Zooming quantizer Q_mu(x) = mu Q(x/mu) where Q rounds coordinate i to the
/// nearest multiple of 2*Delta/theta_op_i (ties away from zero). The current
/// zoom parameter is the only mutable piece of state; the simulation loop is
/// its single writer.
class ZoomQuantizer {
 public:
  ZoomQuantizer(double range_coeff, double error_bound, double mu0,
                Vec theta_op);

  /// Validates Assumption-style initial condition mu0 < R/(M + Gamma Delta).
  static ZoomQuantizer design(double range_coeff, double error_bound,
                              double mu0, const Certificate& cert);

  Vec quantize(const Vec& x) const { return quantize_at(x, mu_); }
  Vec quantize_at(const Vec& x, double mu) const;
  Vec base_quantize(const Vec& y) const;  // mu = 1 grid

  double range_coeff() const { return range_coeff_; }   // M
  double error_bound() const { return error_bound_; }   // Delta
  double mu0() const { return mu0_; }
  double mu() const { return mu_; }
  void set_mu(double mu);
  const Vec& theta_op() const { return theta_op_; }

 private:
  double range_coeff_;
  double error_bound_;
  double mu0_;
  double mu_;
  Vec theta_op_;
};

/// lambda = mu0 (M + Gamma Delta) / R from the zoom design; errors when the
/// initial-zoom condition fails.
double lambda_zoom(const ZoomQuantizer& q, const Certificate& cert);

} // namespace stq
