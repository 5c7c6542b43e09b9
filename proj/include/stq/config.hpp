#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stq/certify.hpp"
#include "stq/plant.hpp"
#include "stq/quantize.hpp"
#include "stq/report.hpp"
#include "stq/simulate.hpp"
#include "stq/stm.hpp"
#include "stq/types.hpp"

namespace stq {

/// Key/value file with [section] headers, '#' comments, and space-separated
/// vector values. Numbers are parsed at full precision; rounding never enters
/// computation.
class ConfigFile {
 public:
  static ConfigFile parse_file(const std::string& path);
  static ConfigFile parse_string(const std::string& text,
                                 const std::string& origin = "<string>");

  bool has(const std::string& section, const std::string& key) const;
  bool has_section(const std::string& section) const;

  std::string get_string(const std::string& section,
                         const std::string& key) const;
  double get_double(const std::string& section, const std::string& key) const;
  long get_long(const std::string& section, const std::string& key) const;
  Vec get_vector(const std::string& section, const std::string& key) const;
  Mat get_matrix(const std::string& section, const std::string& key) const;

  std::string get_string_or(const std::string& section, const std::string& key,
                            const std::string& fallback) const;
  double get_double_or(const std::string& section, const std::string& key,
                       double fallback) const;
  long get_long_or(const std::string& section, const std::string& key,
                   long fallback) const;

  std::optional<double> maybe_double(const std::string& section,
                                     const std::string& key) const;

  /// FNV-1a over the raw file bytes; stamped into every artifact.
  uint64_t hash() const { return hash_; }

 private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
  std::string origin_;
  uint64_t hash_ = 0;
};

/// Everything a batch run needs, assembled from one config file. Scheme
/// preconditions (threshold windows, quantizer windows, initial-state balls)
/// are re-checked when the runnable objects are built, before any long
/// computation, with messages naming the violated inequality and the amount.
struct ExperimentConfig {
  // plant
  std::string plant_name;
  TwoTank tank;
  Mat K;
  double R0 = 0.0;
  std::optional<LurePlant> lure;  // built at load

  // certificate inputs
  double c = 0.0;
  double d1 = 0.0;
  CertifyOptions certify_opts;
  std::optional<std::string> certificate_file;

  // scheme selection and parameters
  Scheme scheme = Scheme::log_quant;
  double rho = 0.0;                    // log
  double sigma_log = 0.0;
  double tau_max = 0.0;
  std::optional<double> chi0;
  std::optional<double> lambda;        // defaults to lambda0 + 1e-4
  std::optional<std::vector<double>> allowed_times;
  double zoom_range = 0.0;             // M
  double zoom_error = 0.0;             // Delta
  double mu0 = 0.0;
  double h = 0.0;
  int ell_max = 0;
  double sigma_zoom = 0.0;

  // simulation
  Vec x0;
  double horizon = 0.0;
  double dt = 1e-5;
  double dt_pred = 1e-4;

  // region sweep
  double region_rho_lo = 0.02;
  double region_rho_hi = 0.999;
  int region_steps = 200;

  std::string out_dir = "out";
  uint64_t seed = 0;
  uint64_t config_hash = 0;

  bool has_log = false;
  bool has_zoom = false;

  static ExperimentConfig load(const std::string& path);

  const LurePlant& plant() const;
  Certificate build_certificate() const;  // computes or loads certificate_file
  LogQuantizer make_log_quantizer(const Certificate& cert) const;
  StmLogConfig make_log_stm(const Certificate& cert,
                            const LogQuantizer& quant) const;
  ZoomQuantizer make_zoom_quantizer(const Certificate& cert) const;
  StmZoomConfig make_zoom_stm() const;
};

/// Full-precision structured-text round trip for certificates.
std::string certificate_to_text(const Certificate& cert, uint64_t config_hash);
Certificate certificate_from_file(const std::string& path);

} // namespace stq
