#include "stq/integrate.hpp"

#include <cmath>

namespace stq {

Vec Trajectory::state_at(double t) const {
  if (times.empty()) {
    throw std::logic_error("trajectory is empty");
  }
  if (t <= times.front()) return states.col(0);
  if (t >= times.back()) return states.col(size() - 1);
  // Uniform grid except for a possible final partial point.
  auto idx = static_cast<Eigen::Index>(std::floor((t - t0) / dt));
  if (idx >= states.cols() - 1) idx = states.cols() - 2;
  while (idx > 0 && times[static_cast<size_t>(idx)] > t) --idx;
  while (idx + 2 < states.cols() && times[static_cast<size_t>(idx + 1)] < t) {
    ++idx;
  }
  const double ta = times[static_cast<size_t>(idx)];
  const double tb = times[static_cast<size_t>(idx + 1)];
  const double w = (t - ta) / (tb - ta);
  return states.col(idx) + w * (states.col(idx + 1) - states.col(idx));
}

Vec rk4_step(const std::function<Vec(const Vec&)>& field, const Vec& x,
             double dt) {
  const Vec k1 = field(x);
  const Vec k2 = field(x + 0.5 * dt * k1);
  const Vec k3 = field(x + 0.5 * dt * k2);
  const Vec k4 = field(x + dt * k3);
  return x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Trajectory integrate_hold(const Plant& p, const Vec& q, const Vec& x0,
                          double duration, double dt) {
  if (duration < 0.0) {
    throw std::invalid_argument("integrate_hold: duration must be >= 0");
  }
  if (!(dt > 0.0)) {
    throw std::invalid_argument("integrate_hold: dt must be positive");
  }
  const Vec u = p.eval_g(q);
  auto field = [&p, &u](const Vec& x) { return p.eval_f(x, u); };

  const auto full_steps = static_cast<long>(std::floor(duration / dt + 1e-9));
  const double tail = duration - static_cast<double>(full_steps) * dt;
  const bool has_tail = tail > 1e-12 * std::max(1.0, duration);
  const long count = full_steps + (has_tail ? 2 : 1);

  Trajectory traj;
  traj.t0 = 0.0;
  traj.dt = dt;
  traj.times.resize(static_cast<size_t>(count));
  traj.states.resize(x0.size(), count);

  Vec x = x0;
  traj.times[0] = 0.0;
  traj.states.col(0) = x;
  for (long k = 1; k <= full_steps; ++k) {
    x = rk4_step(field, x, dt);
    if (!x.allFinite()) {
      throw IntegrationError("integration blew up", static_cast<double>(k) * dt);
    }
    traj.times[static_cast<size_t>(k)] = static_cast<double>(k) * dt;
    traj.states.col(k) = x;
  }
  if (has_tail) {
    x = rk4_step(field, x, tail);
    if (!x.allFinite()) {
      throw IntegrationError("integration blew up", duration);
    }
    traj.times[static_cast<size_t>(count - 1)] = duration;
    traj.states.col(count - 1) = x;
  }
  return traj;
}

Trajectory predict(const Plant& p, const Vec& q, double duration, double dt) {
  return integrate_hold(p, q, q, duration, dt);
}

} // namespace stq
