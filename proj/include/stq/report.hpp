#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace stq {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Shortest round-trip decimal form (std::to_chars); locale-free and
/// deterministic, so identical configs produce byte-identical artifacts.
std::string format_double(double x);

uint64_t fnv1a64(std::string_view bytes);
std::string hash_hex(uint64_t h);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

struct SvgSeries {
  std::string label;
  std::string color;
  std::vector<double> x;
  std::vector<double> y;
};

/// Minimal hand-rolled line chart: axes, tick labels, polylines, legend.
/// Large series are strided down to at most ~2000 points.
std::string render_line_chart(const std::string& title,
                              const std::string& x_label,
                              const std::string& y_label,
                              const std::vector<SvgSeries>& series,
                              uint64_t config_hash);

/// Region chart: lower/upper curves with the feasible band shaded.
std::string render_region_chart(const std::string& title,
                                const std::vector<double>& rho,
                                const std::vector<double>& lower,
                                const std::vector<double>& upper,
                                uint64_t config_hash);

} // namespace stq
