#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "stq/analysis.hpp"

using namespace stq;
using namespace stq::testing;
using doctest::Approx;

TEST_CASE("decay envelope functions") {
  CHECK(big_w(1.0, 0.5, 1.0) == Approx(0.3798854930417225).epsilon(1e-12));
  CHECK(big_w(2.0, 0.5, 1.0) == Approx(0.28310958475848635).epsilon(1e-12));
  CHECK(big_w(1.0, 0.5, 1.0) == Approx(0.37989).epsilon(1e-4));
  CHECK(decay_w(0.0, 0.3, 2.0) == Approx(1.0));

  CHECK_THROWS_AS(decay_w(1.0, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(decay_w(1.0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(decay_w(1.0, 0.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(big_w(0.0, 0.5, 1.0), std::invalid_argument);
}

TEST_CASE("w is dominated by its terminal exponential envelope") {
  for (double eps : {0.1, 0.5, 0.9}) {
    for (double c : {0.2, 1.0, 4.0}) {
      for (double tau_max : {0.18, 1.0, 3.0}) {
        const double gamma = big_w(tau_max, eps, c);
        CHECK(gamma > 0.0);
        for (int i = 0; i <= 400; ++i) {
          const double t = tau_max * i / 400.0;
          CHECK(decay_w(t, eps, c) <= std::exp(-gamma * t) + 1e-12);
        }
      }
    }
  }
}

TEST_CASE("W decreases strictly in t") {
  for (double eps : {0.05, 0.3, 0.6, 0.95}) {
    for (double c : {0.1, 0.7, 2.0, 5.0}) {
      double prev = std::numeric_limits<double>::infinity();
      for (int i = 1; i <= 200; ++i) {
        const double value = big_w(0.02 * i, eps, c);
        CHECK(value < prev);
        prev = value;
      }
    }
  }
}

TEST_CASE("stabilizable region reproduces the reference geometry") {
  const Certificate cert = reference_certificate();
  std::vector<double> grid;
  for (int i = 1; i < 100; ++i) grid.push_back(i / 100.0);
  const RegionTable table = stabilizable_region(grid, cert);

  REQUIRE(table.rho_min.has_value());
  CHECK(*table.rho_min == Approx(0.7734).epsilon(1e-3));
  CHECK(table.sigma_at_crossing == Approx(0.2467).epsilon(1e-3));
  // Closed form of the crossing for the weighted-infinity setup.
  const double closed_form = cert.Gamma / (cert.Gamma + 2.0 * cert.c / cert.alpha);
  CHECK(*table.rho_min == Approx(closed_form).epsilon(1e-5));

  for (const auto& row : table.rows) {
    if (row.rho == 0.85) {
      CHECK(row.lower == Approx(0.1565).epsilon(1e-3));
      CHECK(row.upper == Approx(0.2599).epsilon(1e-3));
      CHECK(row.feasible);
    }
    if (row.rho == 0.5) {
      CHECK(row.lower == Approx(0.6435).epsilon(1e-3));
      CHECK(row.upper == Approx(0.1886).epsilon(1e-3));
      CHECK_FALSE(row.feasible);
    }
  }
  for (size_t i = 1; i < table.rows.size(); ++i) {
    CHECK(table.rows[i].lower < table.rows[i - 1].lower);
    CHECK(table.rows[i].upper > table.rows[i - 1].upper);
  }
}

TEST_CASE("relative error series") {
  const Plant p = reference_lure().to_plant();
  Vec x0(2);
  x0 << 0.1, -0.2;
  const SimResult ideal = run_ideal(p, x0, 0.5, 1e-3);
  const RelativeErrorSeries self = relative_error(ideal, ideal);
  for (size_t i = 0; i < self.value.size(); ++i) {
    CHECK(self.defined[i]);
    CHECK(self.value[i] == 0.0);
  }

  const SimResult rest = run_ideal(p, Vec::Zero(2), 0.5, 1e-3);
  const RelativeErrorSeries undefined = relative_error(rest, rest);
  for (size_t i = 0; i < undefined.value.size(); ++i) {
    CHECK_FALSE(undefined.defined[i]);
    CHECK(std::isnan(undefined.value[i]));
  }

  const SimResult other = run_ideal(p, x0, 0.5, 1e-2);
  CHECK_THROWS_AS(relative_error(ideal, other), std::invalid_argument);
}

TEST_CASE("verification is reproducible bit for bit") {
  const Certificate cert = reference_certificate();
  const Plant p = reference_lure().to_plant();
  const LogQuantizer quant = reference_log_quantizer(cert);
  const StmLogConfig cfg = reference_log_stm(quant, cert);
  Vec x0(2);
  x0 << 0.1, -0.2;
  const SimResult sim = run_log(p, cert, quant, cfg, x0, 0.5, 1e-5);
  const VerificationReport a = verify_theorem(sim, quant, cfg);
  const VerificationReport b = verify_theorem(sim, quant, cfg);
  REQUIRE(a.claims.size() == b.claims.size());
  for (size_t i = 0; i < a.claims.size(); ++i) {
    CHECK(a.claims[i].worst_margin == b.claims[i].worst_margin);
    CHECK(a.claims[i].pass == b.claims[i].pass);
    CHECK(std::isfinite(a.claims[i].worst_margin));
  }
}

TEST_CASE("out-of-theorem threshold flags the decay claim instead of passing") {
  const Certificate cert = reference_certificate();
  const Plant p = reference_lure().to_plant();
  const LogQuantizer quant = reference_log_quantizer(cert);
  const StmLogConfig cfg = reference_log_stm(quant, cert);
  Vec x0(2);
  x0 << 0.1, -0.2;
  const SimResult sim = run_log(p, cert, quant, cfg, x0, 0.5, 1e-4);

  StmLogConfig doctored = cfg;
  doctored.sigma = 0.7;  // beyond sigma1: no rate is guaranteed
  const VerificationReport report = verify_theorem(sim, quant, doctored);
  bool decay_flagged = false;
  for (const auto& claim : report.claims) {
    if (claim.name == "decay") {
      decay_flagged = !claim.pass;
      CHECK(std::isfinite(claim.worst_margin));
    }
  }
  CHECK(decay_flagged);
  CHECK_FALSE(report.all_pass());
}
