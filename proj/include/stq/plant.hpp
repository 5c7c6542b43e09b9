#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "stq/types.hpp"

namespace stq {

/// Scalar C^1 nonlinearity with phi(0) = 0, entering the dynamics through a
/// rank-one channel xi * phi(eta^T x).
struct Nonlinearity {
  std::string name;
  std::function<double(double)> phi;
  std::function<double(double)> phi_prime;
};

/// phi(z) = a*sqrt(H+z) - a*sqrt(H) - z on z >= -H; evaluation below the
/// domain raises std::domain_error rather than returning NaN.
Nonlinearity sqrt_shift_nonlinearity(double a, double H);
Nonlinearity linear_nonlinearity(double slope);
Nonlinearity zero_nonlinearity();

/// Built-in catalog used by config files: "sqrt_shift a H", "linear s", "zero".
Nonlinearity nonlinearity_from_catalog(const std::string& name,
                                       const std::vector<double>& params);

/// A plant dot x = f(x,u) together with its ideal feedback law u = g(x).
/// Construction checks the equilibrium condition f(0, g(0)) = 0.
class Plant {
 public:
  using Field = std::function<Vec(const Vec&, const Vec&)>;
  using Feedback = std::function<Vec(const Vec&)>;
  using Jacobian = std::function<Mat(const Vec&)>;

  Plant(int state_dim, int input_dim, Field f, Feedback g,
        Jacobian closed_jacobian = nullptr);

  int state_dim() const { return n_; }
  int input_dim() const { return m_; }

  Vec eval_f(const Vec& x, const Vec& u) const { return f_(x, u); }
  Vec eval_g(const Vec& x) const { return g_(x); }
  /// F(x,e) = f(x, g(x+e))
  Vec eval_F(const Vec& x, const Vec& e) const { return f_(x, g_(x + e)); }
  /// F0(x) = F(x,0), the ideal closed-loop field.
  Vec eval_F0(const Vec& x) const { return f_(x, g_(x)); }
  /// f_q(x) = f(x, g(q)), the held-input field.
  Vec eval_fq(const Vec& x, const Vec& q) const { return f_(x, g_(q)); }

  /// Jacobian of F0: analytic hook when provided, otherwise central finite
  /// differences with step 1e-6.
  Mat jacobian_F0(const Vec& x) const;

 private:
  int n_, m_;
  Field f_;
  Feedback g_;
  Jacobian jac_;
};

/// Lur'e form dot x = A x + B u + xi * phi(eta^T x) with u = K x.
struct LurePlant {
  Mat A;
  Mat B;
  Mat K;
  Vec xi;
  Vec eta;
  Nonlinearity phi;
  double R0 = std::numeric_limits<double>::infinity();

  LurePlant(Mat A, Mat B, Mat K, Vec xi, Vec eta, Nonlinearity phi,
            double R0);

  int state_dim() const { return static_cast<int>(A.rows()); }
  int input_dim() const { return static_cast<int>(B.cols()); }

  Vec rhs(const Vec& x, const Vec& u) const;
  Plant to_plant() const;
};

/// Two connected tanks with equal cross sections; `a` is the pipe flow
/// constant and `H` the nominal level difference.
struct TwoTank {
  double a = 2.0;
  double H = 1.0;
};

/// The tank dynamics in their original form (control flow enters tank 1).
Plant two_tank_plant(const TwoTank& tank, const Mat& K);

/// Exact rewrite of the tank dynamics as a Lur'e system with
/// phi(z) = a*sqrt(H+z) - a*sqrt(H) - z.
LurePlant lure_from_two_tank(const TwoTank& tank, const Mat& K, double R0);

} // namespace stq
