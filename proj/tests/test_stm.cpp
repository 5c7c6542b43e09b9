#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "stq/stm.hpp"

using namespace stq;
using namespace stq::testing;
using doctest::Approx;

namespace {

// Bisection oracle for the defining equations of the design constants.
double solve_increasing(const std::function<double(double)>& f, double target,
                        double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

} // namespace

TEST_CASE("nu") {
  CHECK(nu(0.001, 0.0, 2.8817) == Approx(0.0028817).epsilon(1e-12));
  CHECK(nu(0.0, 0.3, 1.7) == 0.0);
  CHECK(nu(std::log(2.0), 1.0, 1.0) == Approx(1.0).epsilon(1e-12));
  double prev = 0.0;
  for (int i = 1; i <= 50; ++i) {
    const double value = nu(i * 0.01, 0.7, 2.0);
    CHECK(value > prev);
    prev = value;
  }
}

TEST_CASE("tilde_tau_min solves lambda(1 + nu(t)) = 1") {
  const Certificate cert = reference_certificate();

  const double log_case = tilde_tau_min(0.9251, cert.d1, cert.d2);
  CHECK(log_case == Approx(0.0281).epsilon(1e-2));
  CHECK(log_case == Approx(0.028096462497038767).epsilon(1e-9));

  const double zoom_lambda = 0.9837195165380491;
  const double zoom_case = tilde_tau_min(zoom_lambda, cert.d1, cert.d2);
  CHECK(zoom_case == Approx(0.0057).epsilon(1e-2));
  CHECK(zoom_case == Approx(0.005743207616444346).epsilon(1e-9));

  for (double d1 : {0.0, 0.8, 2.3}) {
    for (double lambda : {0.3, 0.7, 0.95}) {
      const double closed = tilde_tau_min(lambda, d1, cert.d2);
      const double oracle = solve_increasing(
          [&](double t) { return lambda * (1.0 + nu(t, d1, cert.d2)); }, 1.0,
          0.0, 10.0);
      CHECK(closed == Approx(oracle).epsilon(1e-10));
    }
  }
  CHECK_THROWS_AS(tilde_tau_min(1.0, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("tau_min_log solves the threshold equation") {
  const Certificate cert = reference_certificate();
  const double value = tau_min_log(0.85, 0.25, cert);
  CHECK(value == Approx(0.0168).epsilon(1e-2));
  CHECK(value == Approx(0.016802488038986377).epsilon(1e-9));

  const double oracle = solve_increasing(
      [&](double t) {
        return cert.L_op * 0.15 / 1.85 * std::exp(cert.d1 * t) +
               nu(t, cert.d1, cert.d2);
      },
      0.25 / cert.Gamma, 0.0, 1.0);
  CHECK(value == Approx(oracle).epsilon(1e-10));

  CHECK(tau_min_log(0.9, 0.2, cert) == Approx(0.017687).epsilon(1e-3));

  // Nonzero d1 branch against the same oracle.
  Certificate fast = cert;
  fast.d1 = 0.5;
  const double with_growth = tau_min_log(0.85, 0.25, fast);
  const double oracle2 = solve_increasing(
      [&](double t) {
        return fast.L_op * 0.15 / 1.85 * std::exp(fast.d1 * t) +
               nu(t, fast.d1, fast.d2);
      },
      0.25 / fast.Gamma, 0.0, 1.0);
  CHECK(with_growth == Approx(oracle2).epsilon(1e-10));

  // At or below the compatibility boundary there is no positive solution.
  const double boundary = cert.Gamma * cert.L_op * 0.15 / 1.85;
  CHECK_THROWS_AS(tau_min_log(0.85, boundary, cert), std::invalid_argument);
}

TEST_CASE("threshold window for the logarithmic scheme") {
  const Certificate cert = reference_certificate();
  const auto [lo, hi] = sigma_bounds_log(0.85, cert);
  CHECK(lo == Approx(0.1565).epsilon(1e-3));
  CHECK(hi == Approx(0.2599).epsilon(1e-3));
  CHECK(lo == Approx(0.15652718355421058).epsilon(1e-9));
  CHECK(hi == Approx(0.2599095195712715).epsilon(1e-9));
  CHECK(sigma_bounds_log(1.0, cert).second ==
        Approx(0.282842712474619).epsilon(1e-12));
}

TEST_CASE("guaranteed decay rate, logarithmic scheme") {
  const Certificate cert = reference_certificate();
  const double sigma1 = sigma_bounds_log(0.85, cert).second;
  const double gamma = gamma_log(0.25, sigma1, cert.c, 0.18);
  CHECK(gamma == Approx(0.01472).epsilon(1e-2));
  CHECK(gamma == Approx(0.01473416015994723).epsilon(1e-9));

  CHECK(gamma_log(1e-15, sigma1, cert.c, 0.18) ==
        Approx(cert.c).epsilon(1e-10));
  CHECK(gamma_log(sigma1 * (1.0 - 1e-12), sigma1, cert.c, 0.18) ==
        Approx(0.0).scale(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(gamma_log(sigma1, sigma1, cert.c, 0.18),
                  std::invalid_argument);
}

TEST_CASE("threshold window for the zooming scheme") {
  const Certificate cert = reference_certificate();
  const ZoomQuantizer quant = reference_zoom_quantizer(cert);
  const auto [lo, hi] = sigma_bounds_zoom(0.001, quant, cert);
  CHECK(lo == Approx(0.0533).epsilon(1e-3));
  CHECK(hi == Approx(0.2828).epsilon(1e-3));
  CHECK(lo == Approx(0.05331930338052889).epsilon(1e-9));
  CHECK(hi == Approx(0.282842712474619).epsilon(1e-12));

  // As h -> 0 the lower bound collapses to Delta/M.
  const auto [lo0, hi0] = sigma_bounds_zoom(1e-12, quant, cert);
  CHECK(lo0 == Approx(0.005 / 0.105).epsilon(1e-9));
  CHECK(hi0 == hi);

  // An ideal sensor (vanishing error bound) lets the window open from zero.
  const ZoomQuantizer ideal(0.105, 1e-12, 1.0, cert.theta_op);
  CHECK(sigma_bounds_zoom(1e-12, ideal, cert).first < 1e-9);

  CHECK_THROWS_AS(sigma_bounds_zoom(0.01, quant, cert), std::invalid_argument);
}

TEST_CASE("zoom parameter update") {
  const Certificate cert = reference_certificate();
  CHECK(zoom_update(1.0, 0.01, cert, 0.075) ==
        Approx(0.9970665310210287).epsilon(1e-12));
  CHECK(zoom_update(1.0, 0.01, cert, 0.075) == Approx(0.997067).epsilon(1e-5));
  CHECK(zoom_update(1.0, 1e-15, cert, 0.075) == Approx(1.0).epsilon(1e-12));
  CHECK(zoom_update(1.0, 1e6, cert, 0.075) ==
        Approx(cert.alpha * 0.075 / cert.c).epsilon(1e-12));
  CHECK(zoom_update(1.0, 1e6, cert, 0.075) == Approx(0.26516504).epsilon(1e-6));
  CHECK_THROWS_AS(zoom_update(1.0, 0.01, cert, 0.3), std::invalid_argument);

  // Two short updates shrink mu at most as much as one long one.
  for (double t1 : {0.001, 0.05, 0.3, 1.0}) {
    for (double t2 : {0.002, 0.08, 0.5}) {
      const double split = zoom_update(zoom_update(1.0, t1, cert, 0.075), t2,
                                       cert, 0.075);
      const double joint = zoom_update(1.0, t1 + t2, cert, 0.075);
      CHECK(split <= joint + 1e-12);
    }
  }
}

TEST_CASE("guaranteed decay rate, zooming scheme") {
  const Certificate cert = reference_certificate();
  const double gamma = gamma_zoom(0.075, cert, 180, 0.001);
  CHECK(gamma == Approx(0.29108).epsilon(1e-3));
  CHECK(gamma == Approx(0.2910966941631982).epsilon(1e-9));
  CHECK(gamma_zoom(1e-15, cert, 180, 0.001) == Approx(cert.c).epsilon(1e-9));
  // Vanishing window: gamma approaches c - alpha*sigma.
  CHECK(gamma_zoom(0.075, cert, 1, 1e-8) ==
        Approx(cert.c - cert.alpha * 0.075).epsilon(1e-6));
  CHECK_THROWS_AS(gamma_zoom(0.3, cert, 180, 0.001), std::invalid_argument);
}

TEST_CASE("log STM decision on the reference sample") {
  const Certificate cert = reference_certificate();
  const Plant p = reference_lure().to_plant();
  const LogQuantizer quant = reference_log_quantizer(cert);
  const StmLogConfig cfg = reference_log_stm(quant, cert);
  cfg.validate(quant, cert);

  Vec x0(2);
  x0 << 0.1, -0.2;
  const Vec q = quant.quantize(x0);
  const LogDecision decision = next_time_log(p, q, cert, quant, cfg);

  const double dwell =
      std::min({cfg.tau_max, tau_min_log(quant.rho(), cfg.sigma, cert),
                tilde_tau_min(cfg.lambda, cert.d1, cert.d2)});
  CHECK(decision.tau >= dwell);
  CHECK(decision.tau <= cfg.tau_max);
  CHECK(decision.cause == TriggerCause::threshold);

  // The refined crossing brackets the threshold on the interpolated
  // prediction.
  const Trajectory traj = predict(p, q, cfg.tau_max, cfg.dt_pred);
  const double coeff = cert.L_op * (1.0 - quant.rho()) / (1.0 + quant.rho());
  auto psi = [&](double tau) {
    return coeff * std::exp(cert.d1 * tau) * cert.norm_op(q) +
           cert.norm_op(traj.state_at(tau) - q);
  };
  const double thr = cfg.sigma * cert.norm_cl(q);
  CHECK(psi(decision.tau - 1e-6) <= thr + 1e-12);
  CHECK(psi(decision.tau + 1e-6) > thr - 1e-12);

  // Zero sample: nothing ever triggers.
  const LogDecision rest = next_time_log(p, Vec::Zero(2), cert, quant, cfg);
  CHECK(rest.tau == cfg.tau_max);
  CHECK(rest.cause == TriggerCause::max_time);
}

TEST_CASE("log STM discretized onto an allowed set") {
  const Certificate cert = reference_certificate();
  const Plant p = reference_lure().to_plant();
  const LogQuantizer quant = reference_log_quantizer(cert);
  StmLogConfig cfg = reference_log_stm(quant, cert);

  Vec x0(2);
  x0 << 0.1, -0.2;
  const Vec q = quant.quantize(x0);
  const double unsnapped = next_time_log(p, q, cert, quant, cfg).tau;

  cfg.allowed_times = std::vector<double>{0.015, 0.02, 0.04, 0.06,
                                          0.08, 0.12, 0.18};
  cfg.validate(quant, cert);
  const double snapped = next_time_log(p, q, cert, quant, cfg).tau;
  double expected = 0.0;
  for (double s : *cfg.allowed_times) {
    if (s <= unsnapped) expected = s;
  }
  CHECK(snapped == expected);

  // A set whose infimum exceeds the guaranteed dwell is rejected.
  cfg.allowed_times = std::vector<double>{0.02, 0.04, 0.18};
  CHECK_THROWS_AS(cfg.validate(quant, cert), std::invalid_argument);
}

TEST_CASE("log STM config validation names the violated inequality") {
  const Certificate cert = reference_certificate();
  const LogQuantizer quant = reference_log_quantizer(cert);
  StmLogConfig cfg = reference_log_stm(quant, cert);

  cfg.sigma = 0.10;
  CHECK_THROWS_WITH_AS(cfg.validate(quant, cert),
                       doctest::Contains("below the admissible window"),
                       std::invalid_argument);
  cfg.sigma = 0.27;
  CHECK_THROWS_WITH_AS(cfg.validate(quant, cert),
                       doctest::Contains("above the admissible window"),
                       std::invalid_argument);
  cfg = reference_log_stm(quant, cert);
  cfg.lambda = 0.9;  // below lambda0
  CHECK_THROWS_AS(cfg.validate(quant, cert), std::invalid_argument);
}

TEST_CASE("zoom STM decision on the reference sample") {
  const Certificate cert = reference_certificate();
  const Plant p = reference_lure().to_plant();
  const ZoomQuantizer quant = reference_zoom_quantizer(cert);
  const StmZoomConfig cfg = reference_zoom_stm();
  cfg.validate(quant, cert);

  Vec x0(2);
  x0 << 0.1, -0.2;
  const Vec q = quant.quantize_at(x0, 1.0);
  CHECK(q[0] == Approx(0.1).epsilon(1e-12));
  CHECK(q[1] == Approx(-0.2).epsilon(1e-12));

  const ZoomDecision decision = next_steps_zoom(p, q, 1.0, cert, quant, cfg);
  CHECK(decision.ell >= 1);
  CHECK(decision.ell <= cfg.ell_max);
  CHECK_FALSE(decision.immediate);

  // Independent crossing estimate: scan the prediction for the first
  // violation past h and compare floors.
  const Trajectory traj =
      predict(p, q, cfg.ell_max * cfg.h, cfg.dt_pred);
  const double thr = cfg.sigma * quant.range_coeff() * 1.0;
  double crossing = cfg.ell_max * cfg.h;
  for (int i = 0; i < traj.size(); ++i) {
    const double tau = traj.times[static_cast<size_t>(i)];
    if (tau <= cfg.h) continue;
    if (quant.error_bound() * std::exp(cert.d1 * tau) +
            cert.norm_op(traj.state(i) - q) >
        thr) {
      crossing = tau;
      break;
    }
  }
  const int expected = std::max(
      1, static_cast<int>(std::floor(crossing / cfg.h + 1e-9)));
  CHECK(std::abs(decision.ell - expected) <= 1);
}

TEST_CASE("log STM decision under a nonzero growth-rate bound") {
  // Inflating d1 is a sound (looser) growth bound; the dwell guarantee must
  // still hold and the threshold term now grows along the horizon.
  Certificate cert = reference_certificate();
  cert.d1 = 0.5;
  const Plant p = reference_lure().to_plant();
  const LogQuantizer quant = reference_log_quantizer(cert);
  StmLogConfig cfg;
  cfg.sigma = 0.25;
  cfg.tau_max = 0.18;
  cfg.lambda = lambda0_log(quant, cert) + 1e-4;
  cfg.dt_pred = 1e-4;

  Vec x0(2);
  x0 << 0.1, -0.2;
  const Vec q = quant.quantize(x0);
  const LogDecision decision = next_time_log(p, q, cert, quant, cfg);
  const double dwell =
      std::min({cfg.tau_max, tau_min_log(quant.rho(), cfg.sigma, cert),
                tilde_tau_min(cfg.lambda, cert.d1, cert.d2)});
  CHECK(decision.tau >= dwell);
  CHECK(decision.tau <= cfg.tau_max);
  // A larger growth bound can only shorten the inter-sampling time.
  const LogDecision base =
      next_time_log(p, q, reference_certificate(), quant, cfg);
  CHECK(decision.tau <= base.tau + 1e-9);
}

TEST_CASE("zoom STM degenerates to one period when the threshold is tight") {
  const Certificate cert = reference_certificate();
  const Plant p = reference_lure().to_plant();
  const ZoomQuantizer quant = reference_zoom_quantizer(cert);
  StmZoomConfig cfg = reference_zoom_stm();
  // sigma*M*mu below Delta*mu: psi exceeds the threshold the moment checking
  // starts.
  cfg.sigma = 0.03;
  Vec q(2);
  q << 0.1, -0.2;
  const ZoomDecision decision = next_steps_zoom(p, q, 1.0, cert, quant, cfg);
  CHECK(decision.ell == 1);
  CHECK(decision.immediate);
}

TEST_CASE("psi stays below the zoom threshold on the unchecked prefix") {
  const Certificate cert = reference_certificate();
  const Plant p = reference_lure().to_plant();
  const ZoomQuantizer quant = reference_zoom_quantizer(cert);
  const StmZoomConfig cfg = reference_zoom_stm();
  std::uniform_real_distribution<double> mu_dist(0.05, 1.0);
  int kept = 0;
  while (kept < 200) {
    const double mu = mu_dist(rng());
    const Vec x = random_vec(2, -0.105 * mu, 0.105 * mu);
    if (!(cert.norm_cl(x) < quant.range_coeff() * mu)) continue;
    ++kept;
    const Vec q = quant.quantize_at(x, mu);
    const Trajectory traj = predict(p, q, cfg.h, 1e-5);
    const double thr = cfg.sigma * quant.range_coeff() * mu;
    for (int i = 0; i < traj.size(); ++i) {
      const double tau = traj.times[static_cast<size_t>(i)];
      CHECK(quant.error_bound() * mu * std::exp(cert.d1 * tau) +
                cert.norm_op(traj.state(i) - q) <
            thr);
    }
  }
}
