#include "stq/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace stq {

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

uint64_t fnv1a64(std::string_view bytes) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char byte : bytes) {
    h ^= byte;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hash_hex(uint64_t h) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<size_t>(i)] = digits[h & 0xF];
    h >>= 4;
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open '" + path + "' for writing");
  }
  out << content;
  if (!out) {
    throw IoError("failed while writing '" + path + "'");
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open '" + path + "' for reading");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

namespace {

constexpr int kWidth = 900;
constexpr int kHeight = 520;
constexpr int kMarginLeft = 80;
constexpr int kMarginRight = 30;
constexpr int kMarginTop = 50;
constexpr int kMarginBottom = 60;
constexpr size_t kMaxPoints = 2000;

struct Extent {
  double lo = 0.0;
  double hi = 1.0;
  void take(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  static Extent of(const std::vector<const std::vector<double>*>& columns) {
    Extent e;
    bool first = true;
    for (const auto* col : columns) {
      for (double v : *col) {
        if (!std::isfinite(v)) continue;
        if (first) {
          e.lo = e.hi = v;
          first = false;
        } else {
          e.take(v);
        }
      }
    }
    if (e.hi <= e.lo) e.hi = e.lo + 1.0;
    return e;
  }
};

double map_x(double v, const Extent& e) {
  return kMarginLeft +
         (v - e.lo) / (e.hi - e.lo) * (kWidth - kMarginLeft - kMarginRight);
}

double map_y(double v, const Extent& e) {
  return kHeight - kMarginBottom -
         (v - e.lo) / (e.hi - e.lo) * (kHeight - kMarginTop - kMarginBottom);
}

std::string fmt_tick(double v) {
  std::ostringstream out;
  out.precision(4);
  out << v;
  return out.str();
}

void append_axes(std::ostringstream& svg, const Extent& ex, const Extent& ey,
                 const std::string& title, const std::string& x_label,
                 const std::string& y_label) {
  svg << "<rect x='" << kMarginLeft << "' y='" << kMarginTop << "' width='"
      << (kWidth - kMarginLeft - kMarginRight) << "' height='"
      << (kHeight - kMarginTop - kMarginBottom)
      << "' fill='none' stroke='black'/>\n";
  svg << "<text x='" << kWidth / 2 << "' y='28' text-anchor='middle' "
      << "font-size='16'>" << title << "</text>\n";
  svg << "<text x='" << kWidth / 2 << "' y='" << kHeight - 15
      << "' text-anchor='middle' font-size='13'>" << x_label << "</text>\n";
  svg << "<text x='20' y='" << kHeight / 2
      << "' text-anchor='middle' font-size='13' transform='rotate(-90 20 "
      << kHeight / 2 << ")'>" << y_label << "</text>\n";
  for (int i = 0; i <= 5; ++i) {
    const double fx = ex.lo + (ex.hi - ex.lo) * i / 5.0;
    const double px = map_x(fx, ex);
    svg << "<line x1='" << px << "' y1='" << kHeight - kMarginBottom
        << "' x2='" << px << "' y2='" << kHeight - kMarginBottom + 5
        << "' stroke='black'/>\n";
    svg << "<text x='" << px << "' y='" << kHeight - kMarginBottom + 20
        << "' text-anchor='middle' font-size='11'>" << fmt_tick(fx)
        << "</text>\n";
    const double fy = ey.lo + (ey.hi - ey.lo) * i / 5.0;
    const double py = map_y(fy, ey);
    svg << "<line x1='" << kMarginLeft - 5 << "' y1='" << py << "' x2='"
        << kMarginLeft << "' y2='" << py << "' stroke='black'/>\n";
    svg << "<text x='" << kMarginLeft - 8 << "' y='" << py + 4
        << "' text-anchor='end' font-size='11'>" << fmt_tick(fy)
        << "</text>\n";
  }
}

void append_polyline(std::ostringstream& svg, const SvgSeries& s,
                     const Extent& ex, const Extent& ey) {
  const size_t stride = std::max<size_t>(1, s.x.size() / kMaxPoints);
  svg << "<polyline fill='none' stroke='" << s.color
      << "' stroke-width='1.5' points='";
  for (size_t i = 0; i < s.x.size(); i += stride) {
    if (!std::isfinite(s.y[i])) continue;
    svg << map_x(s.x[i], ex) << "," << map_y(s.y[i], ey) << " ";
  }
  if (!s.x.empty() && std::isfinite(s.y.back())) {
    svg << map_x(s.x.back(), ex) << "," << map_y(s.y.back(), ey);
  }
  svg << "'/>\n";
}

std::string svg_header(uint64_t config_hash) {
  std::ostringstream svg;
  svg << "<?xml version='1.0' encoding='UTF-8'?>\n"
      << "<!-- config_hash=" << hash_hex(config_hash) << " -->\n"
      << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kWidth
      << "' height='" << kHeight << "'>\n"
      << "<rect width='100%' height='100%' fill='white'/>\n";
  return svg.str();
}

} // namespace

std::string render_line_chart(const std::string& title,
                              const std::string& x_label,
                              const std::string& y_label,
                              const std::vector<SvgSeries>& series,
                              uint64_t config_hash) {
  std::vector<const std::vector<double>*> xs, ys;
  for (const auto& s : series) {
    xs.push_back(&s.x);
    ys.push_back(&s.y);
  }
  const Extent ex = Extent::of(xs);
  const Extent ey = Extent::of(ys);

  std::ostringstream svg;
  svg << svg_header(config_hash);
  append_axes(svg, ex, ey, title, x_label, y_label);
  int row = 0;
  for (const auto& s : series) {
    append_polyline(svg, s, ex, ey);
    svg << "<line x1='" << kWidth - 200 << "' y1='" << kMarginTop + 14 * row + 8
        << "' x2='" << kWidth - 180 << "' y2='" << kMarginTop + 14 * row + 8
        << "' stroke='" << s.color << "' stroke-width='2'/>\n";
    svg << "<text x='" << kWidth - 175 << "' y='" << kMarginTop + 14 * row + 12
        << "' font-size='11'>" << s.label << "</text>\n";
    ++row;
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string render_region_chart(const std::string& title,
                                const std::vector<double>& rho,
                                const std::vector<double>& lower,
                                const std::vector<double>& upper,
                                uint64_t config_hash) {
  const Extent ex = Extent::of({&rho});
  const Extent ey = Extent::of({&lower, &upper});

  std::ostringstream svg;
  svg << svg_header(config_hash);
  append_axes(svg, ex, ey, title, "density", "threshold");

  // Shade where the window is nonempty.
  svg << "<polygon fill='#d0d0d0' stroke='none' points='";
  for (size_t i = 0; i < rho.size(); ++i) {
    if (lower[i] < upper[i]) {
      svg << map_x(rho[i], ex) << "," << map_y(upper[i], ey) << " ";
    }
  }
  for (size_t i = rho.size(); i-- > 0;) {
    if (lower[i] < upper[i]) {
      svg << map_x(rho[i], ex) << "," << map_y(lower[i], ey) << " ";
    }
  }
  svg << "'/>\n";

  SvgSeries lo_series{"lower bound", "#1f77b4", rho, lower};
  SvgSeries hi_series{"upper bound", "#d62728", rho, upper};
  append_polyline(svg, lo_series, ex, ey);
  append_polyline(svg, hi_series, ex, ey);
  svg << "<text x='" << kWidth - 200 << "' y='" << kMarginTop + 12
      << "' font-size='11' fill='#1f77b4'>lower bound</text>\n";
  svg << "<text x='" << kWidth - 200 << "' y='" << kMarginTop + 26
      << "' font-size='11' fill='#d62728'>upper bound</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

} // namespace stq
