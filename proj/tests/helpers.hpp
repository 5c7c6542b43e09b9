#pragma once

#include <random>

#include "stq/certify.hpp"
#include "stq/plant.hpp"
#include "stq/quantize.hpp"
#include "stq/stm.hpp"

// Shared two-tank fixture: the reference setup every suite exercises.
namespace stq::testing {

inline Mat reference_gain() {
  Mat k(1, 2);
  k << -0.7979326519318133, -0.6162809104412819;
  return k;
}

inline TwoTank reference_tank() { return TwoTank{2.0, 1.0}; }

inline LurePlant reference_lure() {
  return lure_from_two_tank(reference_tank(), reference_gain(), 0.45);
}

inline Certificate reference_certificate() {
  CertifyOptions opts;
  Vec theta_cl(2);
  theta_cl << 1.0, 0.5180;
  Vec theta_op(2);
  theta_op << 1.0, 1.0;
  opts.theta_cl = theta_cl;
  opts.theta_op = theta_op;
  return certify_lure(reference_lure(), 0.4, 0.0, opts);
}

inline LogQuantizer reference_log_quantizer(const Certificate& cert) {
  return LogQuantizer::design(0.85, cert);
}

inline StmLogConfig reference_log_stm(const LogQuantizer& quant,
                                      const Certificate& cert) {
  StmLogConfig cfg;
  cfg.sigma = 0.25;
  cfg.tau_max = 0.18;
  cfg.lambda = lambda0_log(quant, cert) + 1e-4;
  cfg.dt_pred = 1e-4;
  return cfg;
}

inline ZoomQuantizer reference_zoom_quantizer(const Certificate& cert) {
  return ZoomQuantizer::design(0.105, 0.005, 1.0, cert);
}

inline StmZoomConfig reference_zoom_stm() {
  StmZoomConfig cfg;
  cfg.sigma = 0.075;
  cfg.h = 0.001;
  cfg.ell_max = 180;
  cfg.dt_pred = 1e-4;
  return cfg;
}

inline std::mt19937& rng() {
  static std::mt19937 gen(20240817u);
  return gen;
}

inline Vec random_vec(int n, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = dist(rng());
  return v;
}

inline Mat random_mat(int n, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Mat m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = dist(rng());
  }
  return m;
}

} // namespace stq::testing
