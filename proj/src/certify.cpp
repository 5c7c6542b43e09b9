#include "stq/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stq/simplex.hpp"

namespace stq {

namespace {

constexpr double kStrictness = 1e-9;   // margin folded into the LP objective
constexpr double kFloor = 1e-6;        // lower bound on the solved v entries
constexpr double kSlackTol = 1e-12;

double round_outward(double x, int decimals, bool up) {
  const double scale = std::pow(10.0, decimals);
  double y = x * scale;
  // Snap values that are integral up to float noise before rounding outward.
  const double nearest = std::round(y);
  if (std::abs(y - nearest) < 1e-9) y = nearest;
  return (up ? std::ceil(y) : std::floor(y)) / scale;
}

double eval_endpoint(const std::function<double(double)>& f, double z) {
  try {
    return f(z);
  } catch (const std::domain_error&) {
    // One-sided limit: back off slightly into the interval.
    const double inset = std::abs(z) * 1e-12 + 1e-300;
    return f(z > 0 ? z - inset : z + inset);
  }
}

} // namespace

std::pair<double, double> kappa_bounds(
    const std::function<double(double)>& phi_prime, double R0,
    const KappaOptions& opts) {
  if (!(R0 > 0.0)) {
    throw std::invalid_argument("kappa_bounds: R0 must be positive");
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  auto take = [&](double value) {
    if (!std::isfinite(value) || std::abs(value) > 1e12) {
      throw std::runtime_error(
          "kappa_bounds: phi' appears unbounded on the interval");
    }
    lo = std::min(lo, value);
    hi = std::max(hi, value);
  };

  if (std::isinf(R0)) {
    // Probe a wide symmetric grid and require a flat tail.
    for (int k = 0; k <= opts.samples; ++k) {
      const double z = -1e6 + 2e6 * static_cast<double>(k) / opts.samples;
      take(phi_prime(z));
    }
    for (double mag : {1e5, 1e6}) {
      take(phi_prime(mag));
      take(phi_prime(-mag));
    }
    const double tail =
        std::max(std::abs(phi_prime(1e6) - phi_prime(1e5)),
                 std::abs(phi_prime(-1e6) - phi_prime(-1e5)));
    if (tail > 1e-6 * (1.0 + std::max(std::abs(lo), std::abs(hi)))) {
      throw std::runtime_error(
          "kappa_bounds: phi' does not settle on an unbounded region");
    }
  } else {
    for (int k = 0; k < opts.samples; ++k) {
      const double z = -R0 + (k + 0.5) * (2.0 * R0 / opts.samples);
      take(phi_prime(z));
    }
    take(eval_endpoint(phi_prime, -R0));
    take(eval_endpoint(phi_prime, R0));
  }

  if (opts.round_decimals) {
    lo = round_outward(lo, *opts.round_decimals, /*up=*/false);
    hi = round_outward(hi, *opts.round_decimals, /*up=*/true);
  }
  return {lo, hi};
}

ThetaFeasibility verify_theta(const std::vector<Mat>& mats, double rate,
                              const Vec& theta) {
  ThetaFeasibility result;
  if (theta.size() == 0 || theta.minCoeff() <= 0.0) {
    throw std::invalid_argument("verify_theta: theta must be positive");
  }
  const Vec v = theta.cwiseInverse();
  result.min_slack = std::numeric_limits<double>::infinity();
  for (const Mat& m : mats) {
    if (m.rows() != m.cols() || m.rows() != theta.size()) {
      throw std::invalid_argument("verify_theta: dimension mismatch");
    }
    const Vec lhs = metzler_majorant(m) * v;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      const double slack = -rate * v[i] - lhs[i];
      result.slacks.push_back(slack);
      result.min_slack = std::min(result.min_slack, slack);
    }
  }
  result.feasible = result.min_slack >= -kSlackTol;
  return result;
}

std::optional<Vec> lp_feasible_theta(const std::vector<Mat>& mats,
                                     double rate) {
  if (mats.empty()) {
    throw std::invalid_argument("lp_feasible_theta: empty matrix list");
  }
  const int n = static_cast<int>(mats.front().rows());
  for (const Mat& m : mats) {
    if (m.rows() != n || m.cols() != n) {
      throw std::invalid_argument("lp_feasible_theta: dimension mismatch");
    }
  }

  // Unknowns: w_j = v_j - kFloor for j >= 2 (v1 is pinned to 1) and the
  // shared slack s = s_pos - s_neg. Each Metzler row of each matrix yields
  //   sum_j (M_ij + (rate + eps) delta_ij) v_j + s <= 0.
  const int nw = n - 1;
  const int nvars = nw + 2;
  const int nrows = static_cast<int>(mats.size()) * n;
  Mat a = Mat::Zero(nrows, nvars);
  Vec b = Vec::Zero(nrows);
  Vec obj = Vec::Zero(nvars);
  obj[nw] = 1.0;
  obj[nw + 1] = -1.0;

  int row = 0;
  for (const Mat& m : mats) {
    const Mat mm = metzler_majorant(m);
    for (int i = 0; i < n; ++i, ++row) {
      double rhs = 0.0;
      for (int j = 0; j < n; ++j) {
        const double coeff = mm(i, j) + (i == j ? rate + kStrictness : 0.0);
        if (j == 0) {
          rhs -= coeff;
        } else {
          a(row, j - 1) = coeff;
          rhs -= coeff * kFloor;
        }
      }
      a(row, nw) = 1.0;
      a(row, nw + 1) = -1.0;
      b[row] = rhs;
    }
  }

  const SimplexResult sol = solve_simplex(a, b, obj);
  if (sol.status == SimplexResult::Status::unbounded) {
    throw std::runtime_error("lp_feasible_theta: LP unbounded");
  }
  if (sol.status != SimplexResult::Status::optimal) {
    throw std::runtime_error("lp_feasible_theta: LP solver failed");
  }

  Vec v(n);
  v[0] = 1.0;
  for (int j = 1; j < n; ++j) v[j] = kFloor + sol.x[j - 1];

  // The strictness margin shapes the objective only; acceptance is by direct
  // substitution of the original inequalities.
  const ThetaFeasibility check = verify_theta(mats, rate, v.cwiseInverse());
  if (!check.feasible) return std::nullopt;
  return v;
}

std::vector<Mat> closed_loop_matrices(const LurePlant& p, double kappa_min,
                                      double kappa_max) {
  const Mat rank_one = p.xi * p.eta.transpose();
  const Mat abk = p.A + p.B * p.K;
  return {abk + kappa_min * rank_one, abk + kappa_max * rank_one};
}

std::vector<Mat> open_loop_matrices(const LurePlant& p, double kappa_min,
                                    double kappa_max) {
  const Mat rank_one = p.xi * p.eta.transpose();
  return {p.A + kappa_min * rank_one, p.A + kappa_max * rank_one};
}

Certificate certify_lure(const LurePlant& p, double c, double d1,
                         const CertifyOptions& opts) {
  if (!(c > 0.0)) {
    throw std::invalid_argument("certify_lure: c must be positive");
  }
  if (d1 < 0.0) {
    throw std::invalid_argument("certify_lure: d1 must be nonnegative");
  }

  Certificate cert;
  cert.c = c;
  cert.d1 = d1;
  cert.R0 = p.R0;
  cert.sigma0 = opts.sigma0;

  std::tie(cert.kappa_min, cert.kappa_max) =
      kappa_bounds(p.phi.phi_prime, p.R0, opts.kappa);

  const std::vector<Mat> closed =
      closed_loop_matrices(p, cert.kappa_min, cert.kappa_max);
  const std::vector<Mat> open =
      open_loop_matrices(p, cert.kappa_min, cert.kappa_max);

  auto resolve_theta = [](const std::vector<Mat>& mats, double rate,
                          const std::optional<Vec>& override_theta,
                          const std::string& stage) -> Vec {
    if (override_theta) {
      const ThetaFeasibility check = verify_theta(mats, rate, *override_theta);
      if (!check.feasible) {
        throw CertificationError(
            stage, stage + ": supplied weighting is infeasible (worst slack " +
                       std::to_string(check.min_slack) + ")");
      }
      return *override_theta;
    }
    const std::optional<Vec> v = lp_feasible_theta(mats, rate);
    if (!v) {
      throw CertificationError(
          stage, stage + ": no positive weighting satisfies the Metzler row "
                         "inequalities at the requested rate");
    }
    return v->cwiseInverse();
  };

  cert.theta_cl = resolve_theta(closed, c, opts.theta_cl,
                                "closed-loop contraction feasibility");
  cert.theta_op =
      resolve_theta(open, -d1, opts.theta_op, "open-loop growth feasibility");

  const WeightedNorm cl_inv_l1(cert.theta_cl.cwiseInverse(), Exponent::one());
  const WeightedNorm op_inv_l1(cert.theta_op.cwiseInverse(), Exponent::one());
  cert.R1 = p.R0 / weighted_norm(p.eta, cl_inv_l1);
  cert.R2 = p.R0 / weighted_norm(p.eta, op_inv_l1);
  cert.Gamma = gamma_constant(cert.theta_cl, cert.theta_op);
  cert.R = std::min(cert.R1, cert.R2 / cert.Gamma);

  const Mat abk = p.A + p.B * p.K;
  const double xi_op =
      weighted_norm(p.xi, WeightedNorm::weighted_inf(cert.theta_op));
  cert.d2 = weighted_inf_induced_norm(abk, cert.theta_op) +
            cert.kappa_abs() * xi_op * weighted_norm(p.eta, op_inv_l1);

  const Mat scaled_bk = cert.theta_cl.asDiagonal() * (p.B * p.K) *
                        cert.theta_op.cwiseInverse().asDiagonal();
  cert.alpha = scaled_bk.cwiseAbs().rowwise().sum().maxCoeff();
  return cert;
}

double max_feasible_contraction_rate(const LurePlant& p,
                                     const KappaOptions& kappa, double hi,
                                     double tol) {
  const auto [kmin, kmax] = kappa_bounds(p.phi.phi_prime, p.R0, kappa);
  const std::vector<Mat> closed = closed_loop_matrices(p, kmin, kmax);
  auto feasible = [&](double c) {
    return lp_feasible_theta(closed, c).has_value();
  };
  double lo = 0.0;
  if (!feasible(tol)) return 0.0;
  double upper = hi;
  while (feasible(upper)) {
    upper *= 2.0;
    if (upper > 1e12) return upper;
  }
  lo = tol;
  while (upper - lo > tol) {
    const double mid = 0.5 * (lo + upper);
    (feasible(mid) ? lo : upper) = mid;
  }
  return lo;
}

} // namespace stq
