#include "stq/plant.hpp"

#include <stdexcept>

namespace stq {

Nonlinearity sqrt_shift_nonlinearity(double a, double H) {
  if (!(a > 0.0) || !(H > 0.0)) {
    throw std::invalid_argument("sqrt_shift: a and H must be positive");
  }
  const double base = a * std::sqrt(H);
  auto guard = [H](double z) {
    if (H + z < 0.0) {
      throw std::domain_error("sqrt_shift: evaluation outside domain z >= -H");
    }
  };
  return Nonlinearity{
      "sqrt_shift",
      [=](double z) {
        guard(z);
        return a * std::sqrt(H + z) - base - z;
      },
      [=](double z) {
        guard(z);
        return a / (2.0 * std::sqrt(H + z)) - 1.0;
      }};
}

Nonlinearity linear_nonlinearity(double slope) {
  return Nonlinearity{"linear", [slope](double z) { return slope * z; },
                      [slope](double) { return slope; }};
}

Nonlinearity zero_nonlinearity() {
  return Nonlinearity{"zero", [](double) { return 0.0; },
                      [](double) { return 0.0; }};
}

Nonlinearity nonlinearity_from_catalog(const std::string& name,
                                       const std::vector<double>& params) {
  if (name == "sqrt_shift") {
    if (params.size() != 2) {
      throw std::invalid_argument("sqrt_shift takes parameters: a H");
    }
    return sqrt_shift_nonlinearity(params[0], params[1]);
  }
  if (name == "linear") {
    if (params.size() != 1) {
      throw std::invalid_argument("linear takes one parameter: slope");
    }
    return linear_nonlinearity(params[0]);
  }
  if (name == "zero") {
    if (!params.empty()) {
      throw std::invalid_argument("zero takes no parameters");
    }
    return zero_nonlinearity();
  }
  throw std::invalid_argument("unknown nonlinearity '" + name +
                              "' (catalog: sqrt_shift, linear, zero)");
}

Plant::Plant(int state_dim, int input_dim, Field f, Feedback g,
             Jacobian closed_jacobian)
    : n_(state_dim), m_(input_dim), f_(std::move(f)), g_(std::move(g)),
      jac_(std::move(closed_jacobian)) {
  if (n_ <= 0 || m_ <= 0) {
    throw std::invalid_argument("plant dimensions must be positive");
  }
  if (!f_ || !g_) {
    throw std::invalid_argument("plant requires both f and g");
  }
  const Vec zero = Vec::Zero(n_);
  const Vec residual = f_(zero, g_(zero));
  if (residual.cwiseAbs().maxCoeff() > 1e-12) {
    throw std::invalid_argument(
        "plant violates equilibrium condition f(0, g(0)) = 0");
  }
}

Mat Plant::jacobian_F0(const Vec& x) const {
  if (jac_) return jac_(x);
  const double step = 1e-6;
  Mat j(n_, n_);
  for (int col = 0; col < n_; ++col) {
    Vec xp = x;
    Vec xm = x;
    xp[col] += step;
    xm[col] -= step;
    j.col(col) = (eval_F0(xp) - eval_F0(xm)) / (2.0 * step);
  }
  return j;
}

LurePlant::LurePlant(Mat A_, Mat B_, Mat K_, Vec xi_, Vec eta_,
                     Nonlinearity phi_, double R0_)
    : A(std::move(A_)), B(std::move(B_)), K(std::move(K_)), xi(std::move(xi_)),
      eta(std::move(eta_)), phi(std::move(phi_)), R0(R0_) {
  const auto n = A.rows();
  if (A.cols() != n || B.rows() != n || K.cols() != n ||
      K.rows() != B.cols() || xi.size() != n || eta.size() != n) {
    throw std::invalid_argument("lure plant: inconsistent dimensions");
  }
  if (xi.cwiseAbs().maxCoeff() == 0.0 || eta.cwiseAbs().maxCoeff() == 0.0) {
    throw std::invalid_argument("lure plant: xi and eta must be nonzero");
  }
  if (!(R0 > 0.0)) {
    throw std::invalid_argument("lure plant: R0 must be positive");
  }
  if (std::abs(phi.phi(0.0)) > 1e-12) {
    throw std::invalid_argument("lure plant: phi(0) must be 0");
  }
}

Vec LurePlant::rhs(const Vec& x, const Vec& u) const {
  return A * x + B * u + xi * phi.phi(eta.dot(x));
}

Plant LurePlant::to_plant() const {
  const LurePlant self = *this;
  const Mat closed = self.A + self.B * self.K;
  auto jac = [self, closed](const Vec& x) -> Mat {
    return closed +
           self.phi.phi_prime(self.eta.dot(x)) * self.xi * self.eta.transpose();
  };
  return Plant(
      state_dim(), input_dim(),
      [self](const Vec& x, const Vec& u) { return self.rhs(x, u); },
      [self](const Vec& x) -> Vec { return self.K * x; }, jac);
}

Plant two_tank_plant(const TwoTank& tank, const Mat& K) {
  if (!(tank.a > 0.0) || !(tank.H > 0.0)) {
    throw std::invalid_argument("two_tank: a and H must be positive");
  }
  if (K.rows() != 1 || K.cols() != 2) {
    throw std::invalid_argument("two_tank: K must be 1x2");
  }
  const double a = tank.a;
  const double H = tank.H;
  const double base = a * std::sqrt(H);
  const Mat gain = K;
  auto flow = [a, H, base](double z) {
    if (H + z < 0.0) {
      throw std::domain_error("two_tank: level difference outside domain");
    }
    return a * std::sqrt(H + z) - base;
  };
  return Plant(
      2, 1,
      [flow](const Vec& x, const Vec& u) -> Vec {
        const double p = flow(x[1] - x[0]);
        Vec dx(2);
        dx << p + u[0], -p;
        return dx;
      },
      [gain](const Vec& x) -> Vec { return gain * x; });
}

LurePlant lure_from_two_tank(const TwoTank& tank, const Mat& K, double R0) {
  Mat A(2, 2);
  A << -1.0, 1.0, 1.0, -1.0;
  Mat B(2, 1);
  B << 1.0, 0.0;
  Vec xi(2);
  xi << 1.0, -1.0;
  Vec eta(2);
  eta << -1.0, 1.0;
  return LurePlant(A, B, K, xi, eta,
                   sqrt_shift_nonlinearity(tank.a, tank.H), R0);
}

} // namespace stq
