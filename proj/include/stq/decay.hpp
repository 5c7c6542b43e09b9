#pragma once

namespace stq {

/// w(t) = e^{-c t}(1 - eps) + eps for eps in (0,1), c > 0.
double decay_w(double t, double eps, double c);

/// W(t) = -log(w(t))/t. W is strictly decreasing on t > 0, so
/// W(tau_max) is a valid exponential rate for w on [0, tau_max].
double big_w(double t, double eps, double c);

} // namespace stq
