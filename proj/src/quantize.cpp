#include "stq/quantize.hpp"

#include <cmath>
#include <sstream>

namespace stq {

LogQuantizer::LogQuantizer(double rho, double chi0, Vec theta_cl)
    : rho_(rho), chi0_(chi0), theta_cl_(std::move(theta_cl)) {
  if (!(rho > 0.0 && rho < 1.0)) {
    throw std::invalid_argument("log quantizer: rho must lie in (0,1)");
  }
  if (!(chi0 > 0.0) || !std::isfinite(chi0)) {
    throw std::invalid_argument("log quantizer: chi0 must be positive");
  }
  if (theta_cl_.size() == 0 || theta_cl_.minCoeff() <= 0.0) {
    throw std::invalid_argument("log quantizer: weights must be positive");
  }
}

LogQuantizer LogQuantizer::design(double rho, const Certificate& cert,
                                  std::optional<double> chi0) {
  const double lower = cert.R / cert.L_cl2;
  const double upper = 2.0 * cert.R / (cert.L_cl2 * (1.0 + rho));
  const double value = chi0.value_or(lower);
  if (!(value >= lower && value < upper)) {
    std::ostringstream msg;
    msg << "log quantizer: base level chi0 = " << value
        << " violates the window [" << lower << ", " << upper
        << ") required for containment (off by "
        << (value < lower ? lower - value : value - upper) << ")";
    throw std::invalid_argument(msg.str());
  }
  return LogQuantizer(rho, value, cert.theta_cl);
}

double LogQuantizer::level(int coord, long j) const {
  return chi0_ / theta_cl_[coord] * std::pow(rho_, static_cast<double>(j));
}

double LogQuantizer::quantize_scalar(double z, int coord) const {
  if (z == 0.0) return 0.0;
  const double sign = z > 0.0 ? 1.0 : -1.0;
  const double a = std::abs(z);
  const double chi = chi0_ / theta_cl_[coord];
  // Bin index j with chi rho^{j+1} <= a < chi rho^j, located via logs and
  // then corrected at the boundaries.
  long j = static_cast<long>(std::floor(std::log(a / chi) / std::log(rho_)));
  while (a >= chi * std::pow(rho_, static_cast<double>(j))) --j;
  while (a < chi * std::pow(rho_, static_cast<double>(j + 1))) ++j;
  const double cell = chi * std::pow(rho_, static_cast<double>(j));
  return sign * cell * (1.0 + rho_) / 2.0;
}

Vec LogQuantizer::quantize(const Vec& x) const {
  if (x.size() != theta_cl_.size()) {
    throw std::invalid_argument("log quantizer: dimension mismatch");
  }
  Vec q(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    q[i] = quantize_scalar(x[i], static_cast<int>(i));
  }
  return q;
}

double lambda0_log(const LogQuantizer& q, const Certificate& cert) {
  return (1.0 + q.rho()) * cert.L_cl2 * q.chi0() / (2.0 * cert.R);
}

ZoomQuantizer::ZoomQuantizer(double range_coeff, double error_bound,
                             double mu0, Vec theta_op)
    : range_coeff_(range_coeff), error_bound_(error_bound), mu0_(mu0),
      mu_(mu0), theta_op_(std::move(theta_op)) {
  if (!(range_coeff_ > 0.0) || !(error_bound_ > 0.0) || !(mu0_ > 0.0)) {
    throw std::invalid_argument("zoom quantizer: M, Delta, mu0 must be positive");
  }
  if (theta_op_.size() == 0 || theta_op_.minCoeff() <= 0.0) {
    throw std::invalid_argument("zoom quantizer: weights must be positive");
  }
}

ZoomQuantizer ZoomQuantizer::design(double range_coeff, double error_bound,
                                    double mu0, const Certificate& cert) {
  const double bound = cert.R / (range_coeff + cert.Gamma * error_bound);
  if (!(mu0 < bound)) {
    std::ostringstream msg;
    msg << "zoom quantizer: mu0 = " << mu0
        << " must satisfy mu0 < R/(M + Gamma*Delta) = " << bound
        << " (off by " << mu0 - bound << ")";
    throw std::invalid_argument(msg.str());
  }
  return ZoomQuantizer(range_coeff, error_bound, mu0, cert.theta_op);
}

Vec ZoomQuantizer::base_quantize(const Vec& y) const {
  if (y.size() != theta_op_.size()) {
    throw std::invalid_argument("zoom quantizer: dimension mismatch");
  }
  Vec q(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double step = 2.0 * error_bound_ / theta_op_[i];
    const double a = std::abs(y[i]);
    // floor(a/step + 0.5) rounds half-step ties away from zero.
    const double cells = std::floor(a / step + 0.5);
    q[i] = (y[i] < 0.0 ? -1.0 : 1.0) * step * cells;
  }
  return q;
}

Vec ZoomQuantizer::quantize_at(const Vec& x, double mu) const {
  if (!(mu > 0.0)) {
    throw std::invalid_argument("zoom quantizer: mu must be positive");
  }
  return mu * base_quantize(x / mu);
}

void ZoomQuantizer::set_mu(double mu) {
  if (!(mu > 0.0)) {
    throw std::invalid_argument("zoom quantizer: mu must be positive");
  }
  mu_ = mu;
}

double lambda_zoom(const ZoomQuantizer& q, const Certificate& cert) {
  const double lambda =
      q.mu0() * (q.range_coeff() + cert.Gamma * q.error_bound()) / cert.R;
  if (!(lambda < 1.0)) {
    throw std::invalid_argument(
        "zoom quantizer: initial zoom violates mu0 < R/(M + Gamma*Delta)");
  }
  return lambda;
}

} // namespace stq
