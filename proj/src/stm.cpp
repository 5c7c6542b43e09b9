#include "stq/stm.hpp"

#include <cmath>
#include <sstream>

#include "stq/decay.hpp"

namespace stq {

const char* to_string(TriggerCause cause) {
  switch (cause) {
    case TriggerCause::threshold: return "threshold";
    case TriggerCause::ball_exit: return "ball_exit";
    case TriggerCause::max_time: return "max_time";
  }
  return "unknown";
}

double nu(double t, double d1, double d2) {
  if (t < 0.0) throw std::invalid_argument("nu: t must be >= 0");
  if (d1 == 0.0) return d2 * t;
  return d2 * (std::exp(d1 * t) - 1.0) / d1;
}

double tilde_tau_min(double lambda, double d1, double d2) {
  if (!(lambda > 0.0 && lambda < 1.0)) {
    throw std::invalid_argument("tilde_tau_min: lambda must lie in (0,1)");
  }
  if (d1 == 0.0) return (1.0 - lambda) / (d2 * lambda);
  return std::log(1.0 + d1 * (1.0 - lambda) / (d2 * lambda)) / d1;
}

double tau_min_log(double rho, double sigma, const Certificate& cert) {
  const double lower = cert.Gamma * cert.L_op * (1.0 - rho) / (1.0 + rho);
  if (!(sigma > lower)) {
    std::ostringstream msg;
    msg << "tau_min_log: no positive solution; sigma = " << sigma
        << " must exceed Gamma*L_op*(1-rho)/(1+rho) = " << lower;
    throw std::invalid_argument(msg.str());
  }
  if (cert.d1 == 0.0) {
    return (sigma / cert.Gamma - cert.L_op * (1.0 - rho) / (1.0 + rho)) /
           cert.d2;
  }
  const double num =
      sigma * (1.0 + rho) * cert.d1 + cert.Gamma * (1.0 + rho) * cert.d2;
  const double den = cert.Gamma * cert.L_op * (1.0 - rho) * cert.d1 +
                     cert.Gamma * (1.0 + rho) * cert.d2;
  return std::log(num / den) / cert.d1;
}

std::pair<double, double> sigma_bounds_log(double rho,
                                           const Certificate& cert) {
  if (!(rho > 0.0 && rho <= 1.0)) {
    throw std::invalid_argument("sigma_bounds_log: rho must lie in (0,1]");
  }
  const double lower = cert.Gamma * cert.L_op * (1.0 - rho) / (1.0 + rho);
  const double upper =
      2.0 * cert.c * rho / (cert.alpha * cert.L_cl * (1.0 + rho));
  return {lower, upper};
}

double gamma_log(double sigma, double sigma1, double c, double tau_max) {
  if (!(sigma < sigma1)) {
    throw std::invalid_argument("gamma_log: requires sigma < sigma1");
  }
  return big_w(tau_max, sigma / sigma1, c);
}

std::pair<double, double> sigma_bounds_zoom(double h, const ZoomQuantizer& q,
                                            const Certificate& cert) {
  const double lambda = lambda_zoom(q, cert);
  const double horizon = tilde_tau_min(lambda, cert.d1, cert.d2);
  if (!(h > 0.0) || h > horizon + 1e-15) {
    std::ostringstream msg;
    msg << "sigma_bounds_zoom: period h = " << h
        << " must lie in (0, " << horizon << "]";
    throw std::invalid_argument(msg.str());
  }
  const double ratio = q.error_bound() / q.range_coeff();
  const double lower = ratio * (std::exp(cert.d1 * h) + nu(h, cert.d1, cert.d2)) +
                       cert.Gamma * nu(h, cert.d1, cert.d2);
  return {lower, cert.c / cert.alpha};
}

double zoom_update(double mu, double delta_t, const Certificate& cert,
                   double sigma) {
  const double eps = cert.alpha * sigma / cert.c;
  if (!(eps < 1.0)) {
    throw std::invalid_argument(
        "zoom_update: requires alpha*sigma/c < 1 for contraction");
  }
  return (std::exp(-cert.c * delta_t) * (1.0 - eps) + eps) * mu;
}

double gamma_zoom(double sigma, const Certificate& cert, int ell_max,
                  double h) {
  const double eps = cert.alpha * sigma / cert.c;
  if (!(eps < 1.0)) {
    throw std::invalid_argument("gamma_zoom: requires alpha*sigma/c < 1");
  }
  if (ell_max < 1 || !(h > 0.0)) {
    throw std::invalid_argument("gamma_zoom: ell_max >= 1 and h > 0 required");
  }
  return big_w(ell_max * h, eps, cert.c);
}

void StmLogConfig::validate(const LogQuantizer& quant,
                            const Certificate& cert) const {
  const auto [lo, hi] = sigma_bounds_log(quant.rho(), cert);
  std::ostringstream msg;
  if (!(sigma > lo)) {
    msg << "log STM: sigma = " << sigma
        << " is below the admissible window lower bound " << lo << " (by "
        << lo - sigma << ")";
    throw std::invalid_argument(msg.str());
  }
  if (!(sigma < hi)) {
    msg << "log STM: sigma = " << sigma
        << " is above the admissible window upper bound " << hi << " (by "
        << sigma - hi << ")";
    throw std::invalid_argument(msg.str());
  }
  if (!(sigma <= cert.sigma0)) {
    msg << "log STM: sigma = " << sigma << " exceeds sigma0 = " << cert.sigma0;
    throw std::invalid_argument(msg.str());
  }
  if (!(tau_max > 0.0)) {
    throw std::invalid_argument("log STM: tau_max must be positive");
  }
  const double l0 = lambda0_log(quant, cert);
  if (!(lambda > l0 && lambda < 1.0)) {
    msg << "log STM: lambda = " << lambda << " must lie in (" << l0 << ", 1)";
    throw std::invalid_argument(msg.str());
  }
  if (!(dt_pred > 0.0)) {
    throw std::invalid_argument("log STM: dt_pred must be positive");
  }
  if (allowed_times) {
    if (allowed_times->empty()) {
      throw std::invalid_argument("log STM: discretization set is empty");
    }
    const double inf_s = allowed_times->front();
    const double sup_s = allowed_times->back();
    const double dwell = std::min(tau_min_log(quant.rho(), sigma, cert),
                                  tilde_tau_min(lambda, cert.d1, cert.d2));
    if (!(inf_s > 0.0) || inf_s > dwell || sup_s < dwell ||
        sup_s > tau_max + 1e-15) {
      msg << "log STM: discretization set must satisfy 0 < inf S <= "
          << dwell << " <= sup S <= " << tau_max;
      throw std::invalid_argument(msg.str());
    }
  }
}

namespace {

// First grid step on which a predicate fires, refined by bisection on the
// linearly interpolated trajectory to 1e-7 s. `start_after` excludes
// crossings at or before that instant (the zooming scheme skips (0, h]).
struct EventScan {
  bool found = false;
  double time = 0.0;
  bool already_at_start = false;
};

using StatePredicate = std::function<bool(double, const Vec&)>;

double bisect(const StatePredicate& violated, double ta, const Vec& xa,
              double tb, const Vec& xb, double lo) {
  double hi = tb;
  lo = std::max(lo, ta);
  while (hi - lo > 1e-7) {
    const double mid = 0.5 * (lo + hi);
    const double w = (mid - ta) / (tb - ta);
    const Vec xm = xa + w * (xb - xa);
    if (violated(mid, xm)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

} // namespace

LogDecision next_time_log(const Plant& p, const Vec& q,
                          const Certificate& cert, const LogQuantizer& quant,
                          const StmLogConfig& cfg) {
  const double q_op = cert.norm_op(q);
  const double q_cl = cert.norm_cl(q);
  const double thr = cfg.sigma * q_cl;
  const double err_coeff =
      cert.L_op * (1.0 - quant.rho()) / (1.0 + quant.rho());

  auto psi_violated = [&](double tau, const Vec& x) {
    const double psi =
        err_coeff * std::exp(cert.d1 * tau) * q_op + cert.norm_op(x - q);
    return psi > thr;
  };
  auto exit_violated = [&](double, const Vec& x) {
    return cert.norm_op(x) >= cert.R2;
  };

  if (psi_violated(0.0, q)) {
    throw std::runtime_error(
        "log STM: threshold already violated at tau = 0; the configured "
        "(rho, sigma) pair does not dominate the quantization error");
  }

  const Vec u = p.eval_g(q);
  auto field = [&](const Vec& x) { return p.eval_f(x, u); };

  LogDecision decision;
  decision.tau = cfg.tau_max;
  decision.cause = TriggerCause::max_time;

  double t_prev = 0.0;
  Vec x_prev = q;
  bool done = false;
  while (!done) {
    double t_next = t_prev + cfg.dt_pred;
    if (t_next >= cfg.tau_max) {
      t_next = cfg.tau_max;
      done = true;
    }
    Vec x_next = rk4_step(field, x_prev, t_next - t_prev);
    if (!x_next.allFinite()) {
      throw IntegrationError("log STM: prediction blew up", t_next);
    }
    const bool exit_hit = exit_violated(t_next, x_next);
    const bool psi_hit = psi_violated(t_next, x_next);
    if (exit_hit || psi_hit) {
      double best = cfg.tau_max;
      TriggerCause cause = TriggerCause::max_time;
      if (psi_hit) {
        best = bisect(psi_violated, t_prev, x_prev, t_next, x_next, 0.0);
        cause = TriggerCause::threshold;
      }
      if (exit_hit) {
        const double te =
            bisect(exit_violated, t_prev, x_prev, t_next, x_next, 0.0);
        if (te < best) {
          best = te;
          cause = TriggerCause::ball_exit;
        }
      }
      decision.tau = std::min(best, cfg.tau_max);
      decision.cause = cause;
      break;
    }
    t_prev = t_next;
    x_prev = std::move(x_next);
  }

  if (cfg.allowed_times) {
    const auto& s = *cfg.allowed_times;
    double snapped = -1.0;
    for (double candidate : s) {
      if (candidate <= decision.tau + 1e-12) snapped = candidate;
    }
    if (snapped < 0.0) {
      throw std::runtime_error(
          "log STM: no allowed inter-sampling time below the computed one");
    }
    decision.tau = snapped;
  }
  return decision;
}

void StmZoomConfig::validate(const ZoomQuantizer& quant,
                             const Certificate& cert) const {
  std::ostringstream msg;
  if (ell_max < 1) {
    throw std::invalid_argument("zoom STM: ell_max must be >= 1");
  }
  // Also enforces 0 < h <= tilde_tau_min(lambda).
  const auto [lo, hi] = sigma_bounds_zoom(h, quant, cert);
  if (!(sigma >= lo)) {
    msg << "zoom STM: sigma = " << sigma
        << " is below the admissible window lower bound " << lo << " (by "
        << lo - sigma << ")";
    throw std::invalid_argument(msg.str());
  }
  if (!(sigma < hi)) {
    msg << "zoom STM: sigma = " << sigma
        << " is above the admissible window upper bound " << hi << " (by "
        << sigma - hi << ")";
    throw std::invalid_argument(msg.str());
  }
  if (!(sigma <= cert.sigma0)) {
    msg << "zoom STM: sigma = " << sigma << " exceeds sigma0 = " << cert.sigma0;
    throw std::invalid_argument(msg.str());
  }
  if (!(dt_pred > 0.0)) {
    throw std::invalid_argument("zoom STM: dt_pred must be positive");
  }
}

ZoomDecision next_steps_zoom(const Plant& p, const Vec& q, double mu,
                             const Certificate& cert,
                             const ZoomQuantizer& quant,
                             const StmZoomConfig& cfg) {
  const double thr = cfg.sigma * quant.range_coeff() * mu;
  const double err_base = quant.error_bound() * mu;

  auto psi_violated = [&](double tau, const Vec& x) {
    return err_base * std::exp(cert.d1 * tau) + cert.norm_op(x - q) > thr;
  };
  auto exit_violated = [&](double, const Vec& x) {
    return cert.norm_op(x) >= cert.R2;
  };

  const Vec u = p.eval_g(q);
  auto field = [&](const Vec& x) { return p.eval_f(x, u); };

  const double horizon = static_cast<double>(cfg.ell_max) * cfg.h;
  auto floor_h = [&](double tau) {
    return static_cast<int>(std::floor(tau / cfg.h + 1e-12));
  };

  std::optional<double> psi_time;
  std::optional<double> exit_time;
  bool immediate = false;

  double t_prev = 0.0;
  Vec x_prev = q;
  bool done = false;
  while (!done) {
    double t_next = t_prev + cfg.dt_pred;
    if (t_next >= horizon) {
      t_next = horizon;
      done = true;
    }
    Vec x_next = rk4_step(field, x_prev, t_next - t_prev);
    if (!x_next.allFinite()) {
      throw IntegrationError("zoom STM: prediction blew up", t_next);
    }
    if (t_next > cfg.h) {
      const bool exit_hit = exit_violated(t_next, x_next);
      const bool psi_hit = psi_violated(t_next, x_next);
      if (exit_hit || psi_hit) {
        if (psi_hit) {
          psi_time = bisect(psi_violated, t_prev, x_prev, t_next, x_next,
                            cfg.h);
          // Conditions are unchecked on (0, h]; a crossing pinned at h means
          // the threshold was exceeded the moment checking started.
          immediate = *psi_time <= cfg.h + 1e-6;
        }
        if (exit_hit) {
          exit_time = bisect(exit_violated, t_prev, x_prev, t_next, x_next,
                             cfg.h);
        }
        break;
      }
    }
    t_prev = t_next;
    x_prev = std::move(x_next);
  }

  const int ell_tilde =
      exit_time ? std::max(1, floor_h(*exit_time)) : cfg.ell_max;
  int ell = ell_tilde;
  TriggerCause cause =
      exit_time ? TriggerCause::ball_exit : TriggerCause::max_time;
  if (psi_time && (!exit_time || *psi_time <= *exit_time)) {
    const int ell_psi = std::max(1, floor_h(*psi_time));
    if (ell_psi <= ell) {
      ell = ell_psi;
      cause = TriggerCause::threshold;
    }
  }
  ell = std::min(ell, cfg.ell_max);
  if (ell == cfg.ell_max && !exit_time && !psi_time) {
    cause = TriggerCause::max_time;
  }

  ZoomDecision decision;
  decision.ell = ell;
  decision.cause = cause;
  decision.immediate = immediate;
  return decision;
}

} // namespace stq
