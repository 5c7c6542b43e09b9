#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stq/certify.hpp"
#include "stq/integrate.hpp"
#include "stq/quantize.hpp"
#include "stq/stm.hpp"

namespace stq {

enum class Scheme { log_quant, zoom_quant };

const char* to_string(Scheme scheme);

struct SamplingRecord {
  int k = 0;
  double t = 0.0;
  Vec x_at_t;
  Vec q;
  /// STM decision before snapping onto the simulation grid (log scheme) or
  /// ell*h (zoom scheme).
  double tau_stm = 0.0;
  /// Actual t_{k+1} - t_k realized in the simulation.
  double dt_realized = 0.0;
  int ell = 0;                // zoom scheme only
  double mu = 1.0;            // zoom scheme only
  TriggerCause cause = TriggerCause::max_time;
  /// Horizon end cut this interval short; its endpoint is not a sampling
  /// instant.
  bool truncated = false;
};

struct ClaimCheck {
  std::string name;
  std::string bound;
  double worst_margin = 0.0;
  bool pass = false;
};

struct VerificationReport {
  std::vector<ClaimCheck> claims;
  int sample_count = 0;      // sampling instants on (0, horizon]
  double min_dwell = 0.0;    // realized
  bool all_pass() const {
    for (const auto& c : claims) {
      if (!c.pass) return false;
    }
    return true;
  }
};

struct SimResult {
  Trajectory trajectory;
  Mat inputs;  // input_dim x trajectory.size(); held value active from col i
  std::vector<SamplingRecord> records;
  std::optional<Certificate> cert;
  std::vector<std::string> warnings;
  std::optional<VerificationReport> verification;

  /// Sampling instants on (0, horizon]: each non-truncated interval ends in
  /// one.
  int sampling_instants() const;
};

/// Quantized self-triggered closed loop under logarithmic quantization.
/// Sampling instants are snapped to the simulation grid (nearest grid point
/// below t_k + tau_k).
SimResult run_log(const Plant& p, const Certificate& cert,
                  const LogQuantizer& quant, const StmLogConfig& cfg,
                  const Vec& x0, double horizon, double dt);

/// Quantized self-triggered closed loop under zooming quantization; the
/// quantizer's zoom parameter is updated after each realized interval.
SimResult run_zoom(const Plant& p, const Certificate& cert,
                   const ZoomQuantizer& quant, const StmZoomConfig& cfg,
                   const Vec& x0, double horizon, double dt);

/// Ideal closed loop u = g(x) on the same grid; no sampling records.
SimResult run_ideal(const Plant& p, const Vec& x0, double horizon, double dt);

} // namespace stq
