// Acceptance suite: runs every acceptance criterion end to end against the
// bundled two-tank configs and prints one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "stq/analysis.hpp"
#include "stq/config.hpp"
#include "stq/simulate.hpp"

#ifndef STQ_CONFIG_DIR
#define STQ_CONFIG_DIR "configs"
#endif

using namespace stq;

namespace {

struct Checker {
  int fails = 0;

  void crit(const std::string& id, bool pass, const std::string& detail) {
    std::printf("[%s] %s: %s\n", pass ? "PASS" : "FAIL", id.c_str(),
                detail.c_str());
    if (!pass) ++fails;
  }
};

bool near(double value, double target, double tol) {
  return std::abs(value - target) <= tol;
}

double elapsed_s(const std::chrono::steady_clock::time_point& start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(6);
  out << v;
  return out.str();
}

} // namespace

int main() {
  Checker check;
  std::mt19937 gen(0xACCE57u);

  const ExperimentConfig log_cfg =
      ExperimentConfig::load(std::string(STQ_CONFIG_DIR) + "/two_tank.cfg");
  const ExperimentConfig zoom_cfg = ExperimentConfig::load(
      std::string(STQ_CONFIG_DIR) + "/two_tank_zoom.cfg");

  // ---- 1. certification reproduction -----------------------------------
  const auto cert_start = std::chrono::steady_clock::now();
  const Certificate cert = log_cfg.build_certificate();
  const double cert_time = elapsed_s(cert_start);
  {
    const auto closed = closed_loop_matrices(log_cfg.plant(), cert.kappa_min,
                                             cert.kappa_max);
    const auto open =
        open_loop_matrices(log_cfg.plant(), cert.kappa_min, cert.kappa_max);
    Vec theta_cl(2), theta_op(2);
    theta_cl << 1.0, 0.5180;
    theta_op << 1.0, 1.0;
    const bool ok =
        cert.c == 0.4 && cert.d1 == 0.0 &&
        verify_theta(closed, cert.c, theta_cl).feasible &&
        verify_theta(open, -cert.d1, theta_op).feasible &&
        near(cert.d2, 2.8817, 1e-4) && near(cert.Gamma, 1.9305, 1e-4) &&
        near(cert.R1, 0.1536, 1e-4) && cert.R2 == 0.225 &&
        near(cert.R, 0.1166, 1e-4) && near(cert.alpha, 1.4142, 1e-4) &&
        cert_time < 1.0;
    check.crit("1 certification", ok,
               "d2=" + fmt(cert.d2) + " Gamma=" + fmt(cert.Gamma) +
                   " R1=" + fmt(cert.R1) + " R2=" + fmt(cert.R2) +
                   " R=" + fmt(cert.R) + " alpha=" + fmt(cert.alpha) +
                   " in " + fmt(cert_time) + " s");
  }

  const LogQuantizer log_quant = log_cfg.make_log_quantizer(cert);
  const StmLogConfig log_stm = log_cfg.make_log_stm(cert, log_quant);
  const ZoomQuantizer zoom_quant = zoom_cfg.make_zoom_quantizer(cert);
  const StmZoomConfig zoom_stm = zoom_cfg.make_zoom_stm();
  const Plant plant = log_cfg.plant().to_plant();

  // ---- 2. design constants, logarithmic scheme -------------------------
  {
    const auto [lo, hi] = sigma_bounds_log(0.85, cert);
    const double tmin = tau_min_log(0.85, 0.25, cert);
    const double l0 = lambda0_log(log_quant, cert);
    const double ttm = tilde_tau_min(0.9251, cert.d1, cert.d2);
    const auto crossing = region_crossing(cert);
    const double upper_at_one = sigma_bounds_log(1.0, cert).second;
    const bool ok = near(lo, 0.1565, 1e-4) && near(hi, 0.2599, 1e-4) &&
                    near(tmin, 0.0168, 1e-4) && std::abs(l0 - 0.925) < 1e-12 &&
                    near(ttm, 0.0281, 1e-4) && crossing.has_value() &&
                    near(crossing->first, 0.7734, 1e-4) &&
                    near(crossing->second, 0.2467, 1e-4) &&
                    near(upper_at_one, 0.2828, 1e-4);
    check.crit("2 log design constants", ok,
               "window=(" + fmt(lo) + ", " + fmt(hi) + ") tau_min=" +
                   fmt(tmin) + " lambda0=" + fmt(l0) + " tilde_tau=" +
                   fmt(ttm) + " rho_min=" +
                   (crossing ? fmt(crossing->first) : "none") + " value=" +
                   (crossing ? fmt(crossing->second) : "none") +
                   " upper(1)=" + fmt(upper_at_one));
  }

  // ---- 3. design constants, zooming scheme -----------------------------
  {
    const double lambda = lambda_zoom(zoom_quant, cert);
    const double ttm = tilde_tau_min(lambda, cert.d1, cert.d2);
    const auto [lo, hi] = sigma_bounds_zoom(0.001, zoom_quant, cert);
    const bool ok = near(lambda, 0.9837, 1e-4) && near(ttm, 0.0057, 1e-4) &&
                    near(lo, 0.0533, 1e-4) && near(hi, 0.2828, 1e-4) &&
                    zoom_stm.ell_max == 180 &&
                    std::lround(0.18 / zoom_stm.h) == 180;
    check.crit("3 zoom design constants", ok,
               "lambda=" + fmt(lambda) + " tilde_tau=" + fmt(ttm) +
                   " window=[" + fmt(lo) + ", " + fmt(hi) + ") ell_max=" +
                   std::to_string(zoom_stm.ell_max));
  }

  // ---- 4. simulation counts --------------------------------------------
  const auto log_start = std::chrono::steady_clock::now();
  const SimResult log_sim = run_log(plant, cert, log_quant, log_stm,
                                    log_cfg.x0, log_cfg.horizon, log_cfg.dt);
  const double log_time = elapsed_s(log_start);
  const auto zoom_start = std::chrono::steady_clock::now();
  const SimResult zoom_sim =
      run_zoom(plant, cert, zoom_quant, zoom_stm, zoom_cfg.x0,
               zoom_cfg.horizon, zoom_cfg.dt);
  const double zoom_time = elapsed_s(zoom_start);
  {
    const int nl = log_sim.sampling_instants();
    const int nz = zoom_sim.sampling_instants();
    const bool ok = std::abs(nl - 98) <= 3 && std::abs(nz - 100) <= 3 &&
                    log_time < 60.0 && zoom_time < 60.0;
    check.crit("4 sampling counts", ok,
               "log=" + std::to_string(nl) + " (98+-3, " + fmt(log_time) +
                   " s), zoom=" + std::to_string(nz) + " (100+-3, " +
                   fmt(zoom_time) + " s)");
  }

  // ---- 5. theorem guarantees on the reference runs ----------------------
  {
    const VerificationReport lr = verify_theorem(log_sim, log_quant, log_stm);
    const VerificationReport zr =
        verify_theorem(zoom_sim, zoom_quant, zoom_stm);
    double worst_log = std::numeric_limits<double>::infinity();
    for (const auto& c : lr.claims) {
      worst_log = std::min(worst_log, c.worst_margin);
    }
    double worst_zoom = std::numeric_limits<double>::infinity();
    for (const auto& c : zr.claims) {
      worst_zoom = std::min(worst_zoom, c.worst_margin);
    }
    bool steps_on_grid = true;
    for (const auto& r : zoom_sim.records) {
      if (r.truncated) continue;
      const double steps = r.dt_realized / zoom_stm.h;
      if (std::abs(steps - std::round(steps)) > 1e-9 || r.ell < 1 ||
          r.ell > zoom_stm.ell_max) {
        steps_on_grid = false;
      }
    }
    const bool ok = lr.all_pass() && zr.all_pass() &&
                    lr.min_dwell >= 0.0168 - 1e-12 && steps_on_grid &&
                    zoom_sim.warnings.empty();
    check.crit("5 theorem guarantees", ok,
               "log worst margin=" + fmt(worst_log) + ", zoom worst margin=" +
                   fmt(worst_zoom) + ", log min dwell=" + fmt(lr.min_dwell) +
                   ", zoom steps on grid=" + (steps_on_grid ? "yes" : "no"));
  }

  // ---- 6. property suites ------------------------------------------------
  {
    std::uniform_real_distribution<double> box(-1.0, 1.0);
    std::uniform_real_distribution<double> mu_dist(0.02, 1.0);
    bool quant_ok = true;
    const double rho = log_quant.rho();
    const double growth = cert.L_cl * (1.0 + rho) / (2.0 * rho);
    const double err_coeff = cert.L_op * (1.0 - rho) / (1.0 + rho);
    const double lambda_log = log_stm.lambda;
    const double lambda_zm = lambda_zoom(zoom_quant, cert);
    int in_ball = 0;
    for (int i = 0; i < 40000 && quant_ok; ++i) {
      Vec x(2);
      x << box(gen), box(gen);
      const Vec qx = log_quant.quantize(x);
      if (cert.norm_cl(qx) > growth * cert.norm_cl(x) * (1.0 + 1e-12)) {
        quant_ok = false;
      }
      if (cert.norm_op(qx - x) >
          err_coeff * cert.norm_op(qx) * (1.0 + 1e-12)) {
        quant_ok = false;
      }
      // Containment checks on in-range rescales of the same draws.
      Vec xs = x * (cert.R / cert.L_cl) * 0.999;
      if (cert.norm_cl(xs) < cert.R / cert.L_cl) {
        ++in_ball;
        if (!(cert.norm_cl(log_quant.quantize(xs)) < lambda_log * cert.R)) {
          quant_ok = false;
        }
      }
      const double mu = mu_dist(gen);
      Vec xz = x * zoom_quant.range_coeff() * mu * 0.999;
      if (cert.norm_cl(xz) < zoom_quant.range_coeff() * mu) {
        const Vec qz = zoom_quant.quantize_at(xz, mu);
        if (cert.norm_op(qz - xz) >
            zoom_quant.error_bound() * mu * (1.0 + 1e-12)) {
          quant_ok = false;
        }
        if (!(cert.norm_cl(qz) < lambda_zm * cert.R)) quant_ok = false;
      }
    }

    bool pred_ok = true;
    const double horizon = tilde_tau_min(0.9251, cert.d1, cert.d2);
    for (int trial = 0; trial < 100 && pred_ok; ++trial) {
      Vec q(2);
      do {
        q << box(gen) * cert.R2, box(gen) * cert.R2;
      } while (!(cert.norm_op(q) < 0.9251 * cert.R2));
      const Trajectory traj = predict(plant, q, horizon, 1e-4);
      for (int i = 0; i < traj.size(); ++i) {
        const double t = traj.times[static_cast<size_t>(i)];
        if (cert.norm_op(traj.state(i) - q) >
            nu(t, cert.d1, cert.d2) * cert.norm_op(q) + 1e-9) {
          pred_ok = false;
        }
      }
      Vec start(2);
      do {
        start << box(gen) * cert.R2, box(gen) * cert.R2;
      } while (!(cert.norm_op(start) < 0.9251 * cert.R2));
      const Trajectory other = integrate_hold(plant, q, start, horizon, 1e-4);
      const double initial = cert.norm_op(start - q);
      for (int i = 0; i < other.size(); ++i) {
        if (cert.norm_op(other.state(i)) >= cert.R2 ||
            cert.norm_op(traj.state(i)) >= cert.R2) {
          break;
        }
        const double t = other.times[static_cast<size_t>(i)];
        if (cert.norm_op(other.state(i) - traj.state(i)) >
            std::exp(cert.d1 * t) * initial + 1e-9) {
          pred_ok = false;
        }
      }
    }

    bool w_ok = true;
    for (int ie = 1; ie < 20 && w_ok; ++ie) {
      for (int ic = 1; ic < 20 && w_ok; ++ic) {
        const double eps = ie / 20.0;
        const double c = 0.25 * ic;
        double prev = std::numeric_limits<double>::infinity();
        for (int i = 1; i <= 100; ++i) {
          const double value = big_w(0.05 * i, eps, c);
          if (!(value < prev)) w_ok = false;
          prev = value;
        }
      }
    }

    const auto closed = closed_loop_matrices(log_cfg.plant(), cert.kappa_min,
                                             cert.kappa_max);
    const auto open =
        open_loop_matrices(log_cfg.plant(), cert.kappa_min, cert.kappa_max);
    bool lp_ok = true;
    const auto v_closed = lp_feasible_theta(closed, cert.c);
    const auto v_open = lp_feasible_theta(open, -cert.d1);
    if (!v_closed || !v_open) {
      lp_ok = false;
    } else {
      lp_ok =
          verify_theta(closed, cert.c, v_closed->cwiseInverse()).min_slack >=
              -1e-12 &&
          verify_theta(open, -cert.d1, v_open->cwiseInverse()).min_slack >=
              -1e-12;
    }

    Vec conv_x0(2);
    conv_x0 << 0.1, -0.2;
    auto field = [&](const Vec& x) { return plant.eval_F0(x); };
    auto propagate = [&](double dt, double T) {
      Vec x = conv_x0;
      const long steps = std::lround(T / dt);
      for (long i = 0; i < steps; ++i) x = rk4_step(field, x, dt);
      return x;
    };
    const Vec ref = propagate(0.0125 / 16.0, 0.1);
    const double e1 = (propagate(0.0125, 0.1) - ref).cwiseAbs().maxCoeff();
    const double e2 =
        (propagate(0.0125 / 2.0, 0.1) - ref).cwiseAbs().maxCoeff();
    const double ratio = e1 / e2;
    const bool rk_ok = ratio > 12.0 && ratio < 20.0;

    const bool ok = quant_ok && pred_ok && w_ok && lp_ok && rk_ok &&
                    in_ball >= 10000;
    check.crit("6 property suites", ok,
               std::string("quantizers=") + (quant_ok ? "ok" : "FAIL") +
                   " predictions=" + (pred_ok ? "ok" : "FAIL") +
                   " W-monotone=" + (w_ok ? "ok" : "FAIL") + " LP=" +
                   (lp_ok ? "ok" : "FAIL") + " rk4 ratio=" + fmt(ratio));
  }

  // ---- 7. relative-error shape ------------------------------------------
  {
    const SimResult ideal =
        run_ideal(plant, log_cfg.x0, log_cfg.horizon, log_cfg.dt);
    const RelativeErrorSeries e_log = relative_error(log_sim, ideal);
    const RelativeErrorSeries e_zo = relative_error(zoom_sim, ideal);

    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    long n = 0;
    for (size_t i = 0; i < e_log.t.size(); ++i) {
      if (!e_log.defined[i] || e_log.t[i] < 0.5 || e_log.t[i] > 6.0) continue;
      const double x = e_log.t[i];
      const double y = e_log.value[i];
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      syy += y * y;
      ++n;
    }
    const double denom = n * sxx - sx * sx;
    const double slope = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / n;
    double ss_res = 0, ss_tot = 0;
    const double mean = sy / n;
    for (size_t i = 0; i < e_log.t.size(); ++i) {
      if (!e_log.defined[i] || e_log.t[i] < 0.5 || e_log.t[i] > 6.0) continue;
      const double fit = intercept + slope * e_log.t[i];
      ss_res += (e_log.value[i] - fit) * (e_log.value[i] - fit);
      ss_tot += (e_log.value[i] - mean) * (e_log.value[i] - mean);
    }
    const double r2 = 1.0 - ss_res / ss_tot;

    double best_ratio = 0.0;
    for (size_t i = 0; i < e_zo.t.size(); ++i) {
      if (e_zo.t[i] < 3.0 || e_zo.t[i] > 4.0) continue;
      if (!e_zo.defined[i] || !e_log.defined[i] || e_log.value[i] <= 0.0) {
        continue;
      }
      best_ratio = std::max(best_ratio, e_zo.value[i] / e_log.value[i]);
    }
    const bool ok = r2 >= 0.9 && best_ratio >= 2.0;
    check.crit("7 relative-error shape", ok,
               "linear fit R2=" + fmt(r2) + " (>=0.9), max e_zo/e_log on "
               "[3,4]=" + fmt(best_ratio) + " (>=2)");
  }

  if (check.fails == 0) {
    std::printf("acceptance: all criteria passed\n");
  } else {
    std::printf("acceptance: %d criterion(s) FAILED\n", check.fails);
  }
  return check.fails;
}
