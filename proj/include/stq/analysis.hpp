#pragma once

#include <optional>
#include <vector>

#include "stq/decay.hpp"
#include "stq/simulate.hpp"

namespace stq {

/// Post-hoc check of the logarithmic-scheme guarantees on a completed run:
/// monotone exponential decay at rate gamma, the minimum dwell time, and the
/// per-interval measurement-error contract. Reports worst margins; a claim
/// passes when its margin is >= -1e-9 (grid round-off allowance).
VerificationReport verify_theorem(const SimResult& sim,
                                  const LogQuantizer& quant,
                                  const StmLogConfig& cfg);

/// Zooming-scheme counterpart: decay below M mu0 e^{-gamma t}, step counts in
/// [1, ell_max], the error contract, and quantizer range compliance.
VerificationReport verify_theorem(const SimResult& sim,
                                  const ZoomQuantizer& quant,
                                  const StmZoomConfig& cfg);

/// Ideal-loop contraction check ||x(t)||_cl <= e^{-ct} ||x0||_cl.
VerificationReport verify_ideal(const SimResult& sim, const Certificate& cert);

struct RegionRow {
  double rho = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool feasible = false;
};

struct RegionTable {
  std::vector<RegionRow> rows;
  /// Density below which no threshold works; located by bisection on
  /// lower(rho) - upper(rho) to 1e-6.
  std::optional<double> rho_min;
  double sigma_at_crossing = 0.0;
};

RegionTable stabilizable_region(const std::vector<double>& rho_grid,
                                const Certificate& cert);

/// (rho_min, sigma at the crossing) where the window bounds meet, when they
/// do on (0,1).
std::optional<std::pair<double, double>> region_crossing(
    const Certificate& cert);

struct RelativeErrorSeries {
  std::vector<double> t;
  std::vector<double> value;    // NaN where undefined
  std::vector<bool> defined;
};

/// Pointwise ||x(t) - x_ideal(t)||_2 / ||x_ideal(t)||_2 on the shared grid
/// (unweighted Euclidean norms); points with a near-zero ideal state are
/// marked undefined.
RelativeErrorSeries relative_error(const SimResult& sim,
                                   const SimResult& ideal);

} // namespace stq
