#include "stq/decay.hpp"

#include <cmath>
#include <stdexcept>

namespace stq {

double decay_w(double t, double eps, double c) {
  if (!(eps > 0.0 && eps < 1.0)) {
    throw std::invalid_argument("decay_w: eps must lie in (0,1)");
  }
  if (!(c > 0.0) || t < 0.0) {
    throw std::invalid_argument("decay_w: c must be positive and t >= 0");
  }
  return std::exp(-c * t) * (1.0 - eps) + eps;
}

double big_w(double t, double eps, double c) {
  if (!(t > 0.0)) {
    throw std::invalid_argument("big_w: t must be positive");
  }
  return -std::log(decay_w(t, eps, c)) / t;
}

} // namespace stq
