#pragma once

#include <stdexcept>
#include <vector>

#include "stq/plant.hpp"
#include "stq/types.hpp"

namespace stq {

/// Fixed-step dense trajectory. States live on t0 + k*dt with an extra
/// partial point when the duration is not a step multiple; values between
/// grid points come from linear interpolation.
struct Trajectory {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<double> times;
  Mat states;  // state_dim x times.size()

  int size() const { return static_cast<int>(times.size()); }
  Vec state(int i) const { return states.col(i); }
  double last_time() const { return times.back(); }
  Vec state_at(double t) const;
};

struct IntegrationError : std::runtime_error {
  IntegrationError(const std::string& what_, double blowup_time_)
      : std::runtime_error(what_), blowup_time(blowup_time_) {}
  double blowup_time;
};

/// One classical Runge-Kutta step of dot x = field(x).
Vec rk4_step(const std::function<Vec(const Vec&)>& field, const Vec& x,
             double dt);

/// Integrates dot x = f(x, g(q)) from x0 under the held sample q. The final
/// partial step is taken when duration is not a multiple of dt. Non-finite
/// states raise IntegrationError carrying the blow-up time.
Trajectory integrate_hold(const Plant& p, const Vec& q, const Vec& x0,
                          double duration, double dt);

/// State prediction from the quantized sample: integrate_hold with x0 = q.
Trajectory predict(const Plant& p, const Vec& q, double duration, double dt);

} // namespace stq
