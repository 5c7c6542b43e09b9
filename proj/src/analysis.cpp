#include "stq/analysis.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace stq {

namespace {

constexpr double kMarginTol = 1e-9;

double grid_time(const SimResult& sim, long i) {
  return sim.trajectory.times[static_cast<size_t>(i)];
}

// Iterates the grid indices of the interval [t_k, t_{k+1}) belonging to
// record r; assumes records are contiguous on the grid.
std::pair<long, long> interval_indices(const SimResult& sim, size_t rec) {
  const double dt = sim.trajectory.dt;
  const long begin = std::lround(sim.records[rec].t / dt);
  const long end =
      begin + std::lround(sim.records[rec].dt_realized / dt);
  return {begin, end};
}

ClaimCheck decay_claim(const SimResult& sim, const std::string& name,
                       double amplitude, double rate,
                       const std::string& bound_text) {
  const Certificate& cert = *sim.cert;
  double worst = std::numeric_limits<double>::infinity();
  for (long i = 0; i < sim.trajectory.size(); ++i) {
    const double t = grid_time(sim, i);
    const double margin =
        amplitude * std::exp(-rate * t) - cert.norm_cl(sim.trajectory.state(i));
    worst = std::min(worst, margin);
  }
  return {name, bound_text, worst, worst >= -kMarginTol};
}

double realized_min_dwell(const SimResult& sim) {
  double min_dwell = std::numeric_limits<double>::infinity();
  for (const auto& r : sim.records) {
    if (!r.truncated) min_dwell = std::min(min_dwell, r.dt_realized);
  }
  return min_dwell;
}

ClaimCheck error_contract_claim(const SimResult& sim,
                                const std::function<double(size_t)>& threshold,
                                const std::string& bound_text) {
  const Certificate& cert = *sim.cert;
  double worst = std::numeric_limits<double>::infinity();
  for (size_t r = 0; r < sim.records.size(); ++r) {
    const auto [begin, end] = interval_indices(sim, r);
    const Vec& q = sim.records[r].q;
    const double thr = threshold(r);
    const long stop = std::min<long>(end, sim.trajectory.size() - 1);
    for (long i = begin; i <= stop; ++i) {
      if (i == end) break;  // endpoint belongs to the next interval
      const double margin = thr - cert.norm_op(q - sim.trajectory.state(i));
      worst = std::min(worst, margin);
    }
  }
  return {"error_contract", bound_text, worst, worst >= -kMarginTol};
}

} // namespace

VerificationReport verify_theorem(const SimResult& sim,
                                  const LogQuantizer& quant,
                                  const StmLogConfig& cfg) {
  if (!sim.cert) {
    throw std::invalid_argument("verify_theorem: result carries no certificate");
  }
  const Certificate& cert = *sim.cert;
  VerificationReport report;
  report.sample_count = sim.sampling_instants();
  report.min_dwell = realized_min_dwell(sim);

  const auto [lo, sigma1] = sigma_bounds_log(quant.rho(), cert);
  (void)lo;
  const double x0_cl = cert.norm_cl(sim.trajectory.state(0));
  if (cfg.sigma < sigma1) {
    const double gamma = gamma_log(cfg.sigma, sigma1, cert.c, cfg.tau_max);
    std::ostringstream bound;
    bound << "||x(t)||_cl <= e^{-" << gamma << " t} * " << x0_cl;
    report.claims.push_back(decay_claim(sim, "decay", x0_cl, gamma,
                                        bound.str()));
  } else {
    // Out-of-theorem configuration: no decay rate is guaranteed.
    report.claims.push_back({"decay", "undefined: sigma >= sigma1",
                             -std::numeric_limits<double>::max(), false});
  }
  {
    const double dwell_bound =
        std::min({cfg.tau_max, tau_min_log(quant.rho(), cfg.sigma, cert),
                  tilde_tau_min(cfg.lambda, cert.d1, cert.d2)});
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& r : sim.records) {
      worst = std::min(worst, r.tau_stm - dwell_bound);
    }
    std::ostringstream bound;
    bound << "tau_k >= min{tau_max, tau_min, tilde_tau_min} = " << dwell_bound;
    report.claims.push_back(
        {"min_dwell", bound.str(), worst, worst >= -kMarginTol});
  }
  {
    std::ostringstream bound;
    bound << "||q_k - x(t)||_op <= " << cfg.sigma << " ||q_k||_cl on each interval";
    auto thr = [&](size_t r) { return cfg.sigma * cert.norm_cl(sim.records[r].q); };
    report.claims.push_back(error_contract_claim(sim, thr, bound.str()));
  }
  return report;
}

VerificationReport verify_theorem(const SimResult& sim,
                                  const ZoomQuantizer& quant,
                                  const StmZoomConfig& cfg) {
  if (!sim.cert) {
    throw std::invalid_argument("verify_theorem: result carries no certificate");
  }
  const Certificate& cert = *sim.cert;
  VerificationReport report;
  report.sample_count = sim.sampling_instants();
  report.min_dwell = realized_min_dwell(sim);

  const double amplitude = quant.range_coeff() * quant.mu0();
  if (cert.alpha * cfg.sigma < cert.c) {
    const double gamma = gamma_zoom(cfg.sigma, cert, cfg.ell_max, cfg.h);
    std::ostringstream bound;
    bound << "||x(t)||_cl < " << amplitude << " e^{-" << gamma << " t}";
    report.claims.push_back(
        decay_claim(sim, "decay", amplitude, gamma, bound.str()));
  } else {
    report.claims.push_back({"decay", "undefined: alpha*sigma >= c",
                             -std::numeric_limits<double>::max(), false});
  }
  {
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& r : sim.records) {
      worst = std::min(worst,
                       static_cast<double>(std::min(r.ell - 1,
                                                    cfg.ell_max - r.ell)));
    }
    std::ostringstream bound;
    bound << "ell_k in [1, " << cfg.ell_max << "]";
    report.claims.push_back({"step_bounds", bound.str(), worst, worst >= 0.0});
  }
  {
    std::ostringstream bound;
    bound << "||q_k - x(t)||_op <= " << cfg.sigma << " * M * mu_k on each interval";
    auto thr = [&](size_t r) {
      return cfg.sigma * quant.range_coeff() * sim.records[r].mu;
    };
    report.claims.push_back(error_contract_claim(sim, thr, bound.str()));
  }
  {
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& r : sim.records) {
      worst = std::min(worst, quant.range_coeff() * r.mu -
                                  cert.norm_cl(r.x_at_t));
    }
    report.claims.push_back({"range_compliance",
                             "||x(t_k)||_cl < M mu_k at every sample", worst,
                             worst > 0.0});
  }
  return report;
}

VerificationReport verify_ideal(const SimResult& sim,
                                const Certificate& cert) {
  VerificationReport report;
  report.sample_count = 0;
  report.min_dwell = 0.0;
  const double x0_cl = cert.norm_cl(sim.trajectory.state(0));
  SimResult with_cert = sim;
  with_cert.cert = cert;
  std::ostringstream bound;
  bound << "||x(t)||_cl <= e^{-" << cert.c << " t} * " << x0_cl;
  report.claims.push_back(
      decay_claim(with_cert, "contraction_decay", x0_cl, cert.c, bound.str()));
  return report;
}

std::optional<std::pair<double, double>> region_crossing(
    const Certificate& cert) {
  // lower is decreasing and upper increasing in rho, so the gap function has
  // at most one sign change on (0, 1).
  auto gap = [&](double rho) {
    const auto [lo, hi] = sigma_bounds_log(rho, cert);
    return lo - hi;
  };
  double a = 1e-9;
  double b = 1.0 - 1e-12;
  if (!(gap(a) > 0.0 && gap(b) < 0.0)) return std::nullopt;
  while (b - a > 1e-6) {
    const double mid = 0.5 * (a + b);
    (gap(mid) > 0.0 ? a : b) = mid;
  }
  const double rho_min = 0.5 * (a + b);
  return std::make_pair(rho_min, sigma_bounds_log(rho_min, cert).second);
}

RegionTable stabilizable_region(const std::vector<double>& rho_grid,
                                const Certificate& cert) {
  RegionTable table;
  for (double rho : rho_grid) {
    const auto [lo, hi] = sigma_bounds_log(rho, cert);
    table.rows.push_back({rho, lo, hi, lo < hi});
  }
  if (const auto crossing = region_crossing(cert)) {
    table.rho_min = crossing->first;
    table.sigma_at_crossing = crossing->second;
  }
  return table;
}

RelativeErrorSeries relative_error(const SimResult& sim,
                                   const SimResult& ideal) {
  if (sim.trajectory.size() != ideal.trajectory.size() ||
      std::abs(sim.trajectory.dt - ideal.trajectory.dt) > 0.0) {
    throw std::invalid_argument(
        "relative_error: runs must share the same grid and horizon");
  }
  RelativeErrorSeries series;
  const long n = sim.trajectory.size();
  series.t.reserve(static_cast<size_t>(n));
  series.value.reserve(static_cast<size_t>(n));
  series.defined.reserve(static_cast<size_t>(n));
  for (long i = 0; i < n; ++i) {
    const double denom = ideal.trajectory.state(i).norm();
    series.t.push_back(sim.trajectory.times[static_cast<size_t>(i)]);
    if (denom < 1e-12) {
      series.value.push_back(std::numeric_limits<double>::quiet_NaN());
      series.defined.push_back(false);
    } else {
      series.value.push_back(
          (sim.trajectory.state(i) - ideal.trajectory.state(i)).norm() /
          denom);
      series.defined.push_back(true);
    }
  }
  return series;
}

} // namespace stq
