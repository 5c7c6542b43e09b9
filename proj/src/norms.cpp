#include "stq/norms.hpp"

#include <cmath>

namespace stq {

Exponent Exponent::finite(double r) {
  if (!(r >= 1.0) || !std::isfinite(r)) {
    throw std::invalid_argument("norm exponent must be a finite r >= 1");
  }
  return Exponent(r, false);
}

double Exponent::value() const {
  if (infinite_) {
    throw std::logic_error("infinity exponent has no finite value");
  }
  return r_;
}

WeightedNorm::WeightedNorm(Vec w, Exponent e)
    : weights(std::move(w)), exponent(e) {
  if (weights.size() == 0) {
    throw std::invalid_argument("weight vector must be non-empty");
  }
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    if (!(weights[i] > 0.0) || !std::isfinite(weights[i])) {
      throw std::invalid_argument("weights must be strictly positive");
    }
  }
}

double weighted_norm(const Vec& x, const WeightedNorm& nrm) {
  if (x.size() != nrm.weights.size()) {
    throw std::invalid_argument("weighted_norm: dimension mismatch");
  }
  const Vec scaled = nrm.weights.cwiseProduct(x).cwiseAbs();
  if (nrm.exponent.is_infinity()) {
    return scaled.maxCoeff();
  }
  const double r = nrm.exponent.value();
  if (r == 1.0) return scaled.sum();
  if (r == 2.0) return scaled.norm();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < scaled.size(); ++i) {
    acc += std::pow(scaled[i], r);
  }
  return std::pow(acc, 1.0 / r);
}

Mat metzler_majorant(const Mat& a) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument("metzler_majorant: matrix must be square");
  }
  Mat m = a.cwiseAbs();
  m.diagonal() = a.diagonal();
  return m;
}

double weighted_inf_log_norm(const Mat& a, const Vec& theta) {
  if (a.rows() != a.cols() || a.rows() != theta.size()) {
    throw std::invalid_argument("weighted_inf_log_norm: dimension mismatch");
  }
  double mu = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    double row = a(i, i);
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (j == i) continue;
      row += std::abs(theta[i] * a(i, j) / theta[j]);
    }
    mu = std::max(mu, row);
  }
  return mu;
}

double weighted_inf_induced_norm(const Mat& a, const Vec& theta) {
  if (a.rows() != a.cols() || a.rows() != theta.size()) {
    throw std::invalid_argument("weighted_inf_induced_norm: dimension mismatch");
  }
  double nrm = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    double row = 0.0;
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      row += std::abs(theta[i] * a(i, j) / theta[j]);
    }
    nrm = std::max(nrm, row);
  }
  return nrm;
}

double gamma_constant(const Vec& theta_cl, const Vec& theta_op) {
  if (theta_cl.size() != theta_op.size()) {
    throw std::invalid_argument("gamma_constant: dimension mismatch");
  }
  return (theta_op.cwiseQuotient(theta_cl)).maxCoeff();
}

} // namespace stq
