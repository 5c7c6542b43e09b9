#include "stq/simulate.hpp"

#include <cmath>
#include <sstream>

namespace stq {

const char* to_string(Scheme scheme) {
  return scheme == Scheme::log_quant ? "log" : "zoom";
}

int SimResult::sampling_instants() const {
  int count = 0;
  for (const auto& r : records) {
    if (!r.truncated) ++count;
  }
  return count;
}

namespace {

struct Grid {
  long full_steps = 0;
  double tail = 0.0;
  long cols = 0;
};

Grid make_grid(double horizon, double dt) {
  if (!(horizon > 0.0) || !(dt > 0.0)) {
    throw std::invalid_argument("simulation requires horizon > 0 and dt > 0");
  }
  Grid g;
  g.full_steps = static_cast<long>(std::floor(horizon / dt + 1e-9));
  g.tail = horizon - static_cast<double>(g.full_steps) * dt;
  if (g.tail < 1e-12 * horizon) g.tail = 0.0;
  g.cols = g.full_steps + 1 + (g.tail > 0.0 ? 1 : 0);
  return g;
}

void init_result(SimResult& sim, const Plant& p, const Grid& g, double dt) {
  sim.trajectory.t0 = 0.0;
  sim.trajectory.dt = dt;
  sim.trajectory.times.resize(static_cast<size_t>(g.cols));
  for (long i = 0; i <= g.full_steps; ++i) {
    sim.trajectory.times[static_cast<size_t>(i)] = static_cast<double>(i) * dt;
  }
  if (g.tail > 0.0) {
    sim.trajectory.times.back() =
        static_cast<double>(g.full_steps) * dt + g.tail;
  }
  sim.trajectory.states.resize(p.state_dim(), g.cols);
  sim.inputs.setZero(p.input_dim(), g.cols);
}

// Advances the state over grid indices [from, to) under the held input,
// writing states and inputs as it goes.
void hold_segment(SimResult& sim, const Plant& p, const Vec& u, long from,
                  long to, double dt) {
  auto field = [&](const Vec& x) { return p.eval_f(x, u); };
  Vec x = sim.trajectory.states.col(from);
  for (long i = from; i < to; ++i) {
    sim.inputs.col(i) = u;
    x = rk4_step(field, x, dt);
    if (!x.allFinite()) {
      throw IntegrationError("closed-loop integration blew up",
                             static_cast<double>(i + 1) * dt);
    }
    sim.trajectory.states.col(i + 1) = x;
  }
}

void finish_tail(SimResult& sim, const Plant& p, const Vec& u,
                 const Grid& g) {
  if (g.tail <= 0.0) return;
  auto field = [&](const Vec& x) { return p.eval_f(x, u); };
  const long last_full = g.full_steps;
  sim.inputs.col(last_full) = u;
  Vec x = rk4_step(field, sim.trajectory.states.col(last_full), g.tail);
  if (!x.allFinite()) {
    throw IntegrationError("closed-loop integration blew up",
                           sim.trajectory.times.back());
  }
  sim.trajectory.states.col(g.cols - 1) = x;
  sim.inputs.col(g.cols - 1) = u;
}

} // namespace

SimResult run_log(const Plant& p, const Certificate& cert,
                  const LogQuantizer& quant, const StmLogConfig& cfg,
                  const Vec& x0, double horizon, double dt) {
  cfg.validate(quant, cert);
  const double radius = cert.R / cert.L_cl;
  if (!(cert.norm_cl(x0) < radius)) {
    std::ostringstream msg;
    msg << "run_log: ||x0||_cl = " << cert.norm_cl(x0)
        << " must be below R/L_cl = " << radius;
    throw std::invalid_argument(msg.str());
  }

  const Grid grid = make_grid(horizon, dt);
  SimResult sim;
  sim.cert = cert;
  init_result(sim, p, grid, dt);
  sim.trajectory.states.col(0) = x0;

  long idx = 0;
  int k = 0;
  Vec u = Vec::Zero(p.input_dim());
  while (idx < grid.full_steps) {
    const Vec x_k = sim.trajectory.states.col(idx);
    const Vec q_k = quant.quantize(x_k);
    const LogDecision decision = next_time_log(p, q_k, cert, quant, cfg);
    const long step = static_cast<long>(std::floor(decision.tau / dt + 1e-9));
    if (step < 1) {
      throw std::runtime_error(
          "run_log: STM returned an inter-sampling time below the grid step");
    }
    const long next = std::min(idx + step, grid.full_steps);
    u = p.eval_g(q_k);
    hold_segment(sim, p, u, idx, next, dt);

    SamplingRecord rec;
    rec.k = k++;
    rec.t = static_cast<double>(idx) * dt;
    rec.x_at_t = x_k;
    rec.q = q_k;
    rec.tau_stm = decision.tau;
    rec.dt_realized = static_cast<double>(next - idx) * dt;
    rec.cause = decision.cause;
    rec.truncated = idx + step > grid.full_steps;
    sim.records.push_back(std::move(rec));
    idx = next;
  }
  sim.inputs.col(grid.full_steps) = u;
  finish_tail(sim, p, u, grid);
  if (grid.tail > 0.0 && !sim.records.empty()) {
    sim.records.back().truncated = true;
  }
  return sim;
}

SimResult run_zoom(const Plant& p, const Certificate& cert,
                   const ZoomQuantizer& quant, const StmZoomConfig& cfg,
                   const Vec& x0, double horizon, double dt) {
  cfg.validate(quant, cert);
  const double mu0 = quant.mu0();
  if (!(cert.norm_cl(x0) < quant.range_coeff() * mu0)) {
    std::ostringstream msg;
    msg << "run_zoom: ||x0||_cl = " << cert.norm_cl(x0)
        << " must be below M*mu0 = " << quant.range_coeff() * mu0;
    throw std::invalid_argument(msg.str());
  }
  const double steps_per_h_real = cfg.h / dt;
  const long steps_per_h = std::lround(steps_per_h_real);
  if (steps_per_h < 1 ||
      std::abs(steps_per_h_real - static_cast<double>(steps_per_h)) > 1e-9) {
    throw std::invalid_argument(
        "run_zoom: the period h must be an integer multiple of dt");
  }

  const Grid grid = make_grid(horizon, dt);
  SimResult sim;
  sim.cert = cert;
  init_result(sim, p, grid, dt);
  sim.trajectory.states.col(0) = x0;

  long idx = 0;
  int k = 0;
  double mu = mu0;
  Vec u = Vec::Zero(p.input_dim());
  while (idx < grid.full_steps) {
    const Vec x_k = sim.trajectory.states.col(idx);
    if (!(cert.norm_cl(x_k) < quant.range_coeff() * mu)) {
      std::ostringstream msg;
      msg << "sample " << k << " at t = " << static_cast<double>(idx) * dt
          << " violates the quantizer range ||x||_cl < M*mu_k";
      sim.warnings.push_back(msg.str());
    }
    const Vec q_k = quant.quantize_at(x_k, mu);
    const ZoomDecision decision =
        next_steps_zoom(p, q_k, mu, cert, quant, cfg);
    if (decision.immediate) {
      std::ostringstream msg;
      msg << "sample " << k
          << ": threshold already exceeded just past h; ell = 1";
      sim.warnings.push_back(msg.str());
    }
    const long step = static_cast<long>(decision.ell) * steps_per_h;
    const long next = std::min(idx + step, grid.full_steps);
    u = p.eval_g(q_k);
    hold_segment(sim, p, u, idx, next, dt);

    SamplingRecord rec;
    rec.k = k++;
    rec.t = static_cast<double>(idx) * dt;
    rec.x_at_t = x_k;
    rec.q = q_k;
    rec.ell = decision.ell;
    rec.mu = mu;
    rec.tau_stm = static_cast<double>(decision.ell) * cfg.h;
    rec.dt_realized = static_cast<double>(next - idx) * dt;
    rec.cause = decision.cause;
    rec.truncated = idx + step > grid.full_steps;
    sim.records.push_back(std::move(rec));

    mu = zoom_update(mu, static_cast<double>(next - idx) * dt, cert,
                     cfg.sigma);
    idx = next;
  }
  sim.inputs.col(grid.full_steps) = u;
  finish_tail(sim, p, u, grid);
  if (grid.tail > 0.0 && !sim.records.empty()) {
    sim.records.back().truncated = true;
  }
  return sim;
}

SimResult run_ideal(const Plant& p, const Vec& x0, double horizon, double dt) {
  const Grid grid = make_grid(horizon, dt);
  SimResult sim;
  init_result(sim, p, grid, dt);
  sim.trajectory.states.col(0) = x0;

  auto field = [&](const Vec& x) { return p.eval_F0(x); };
  Vec x = x0;
  sim.inputs.col(0) = p.eval_g(x);
  for (long i = 0; i < grid.full_steps; ++i) {
    x = rk4_step(field, x, dt);
    if (!x.allFinite()) {
      throw IntegrationError("ideal closed-loop integration blew up",
                             static_cast<double>(i + 1) * dt);
    }
    sim.trajectory.states.col(i + 1) = x;
    sim.inputs.col(i + 1) = p.eval_g(x);
  }
  if (grid.tail > 0.0) {
    x = rk4_step(field, x, grid.tail);
    sim.trajectory.states.col(grid.cols - 1) = x;
    sim.inputs.col(grid.cols - 1) = p.eval_g(x);
  }
  return sim;
}

} // namespace stq
