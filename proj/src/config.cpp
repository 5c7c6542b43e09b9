#include "stq/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace stq {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> tokens(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

double parse_double(const std::string& raw, const std::string& where) {
  const std::string value = trim(raw);
  if (value == "inf") return std::numeric_limits<double>::infinity();
  char* end = nullptr;
  const double parsed = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || *end != '\0') {
    throw std::invalid_argument("config: '" + value + "' at " + where +
                                " is not a number");
  }
  return parsed;
}

} // namespace

ConfigFile ConfigFile::parse_string(const std::string& text,
                                    const std::string& origin) {
  ConfigFile cfg;
  cfg.origin_ = origin;
  cfg.hash_ = fnv1a64(text);
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line.erase(comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw std::invalid_argument(origin + ":" + std::to_string(lineno) +
                                    ": malformed section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      cfg.sections_[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(origin + ":" + std::to_string(lineno) +
                                  ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw std::invalid_argument(origin + ":" + std::to_string(lineno) +
                                  ": empty key");
    }
    cfg.sections_[section][key] = value;
  }
  return cfg;
}

ConfigFile ConfigFile::parse_file(const std::string& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const IoError& e) {
    throw IoError(std::string("config: ") + e.what());
  }
  return parse_string(text, path);
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
  const auto sec = sections_.find(section);
  return sec != sections_.end() && sec->second.count(key) > 0;
}

bool ConfigFile::has_section(const std::string& section) const {
  return sections_.count(section) > 0;
}

std::string ConfigFile::get_string(const std::string& section,
                                   const std::string& key) const {
  const auto sec = sections_.find(section);
  if (sec == sections_.end() || sec->second.count(key) == 0) {
    throw std::invalid_argument(origin_ + ": missing key '" + key +
                                "' in section [" + section + "]");
  }
  return sec->second.at(key);
}

double ConfigFile::get_double(const std::string& section,
                              const std::string& key) const {
  return parse_double(get_string(section, key),
                      "[" + section + "] " + key);
}

long ConfigFile::get_long(const std::string& section,
                          const std::string& key) const {
  const double v = get_double(section, key);
  const long rounded = std::lround(v);
  if (std::abs(v - static_cast<double>(rounded)) > 1e-9) {
    throw std::invalid_argument(origin_ + ": [" + section + "] " + key +
                                " must be an integer");
  }
  return rounded;
}

Vec ConfigFile::get_vector(const std::string& section,
                           const std::string& key) const {
  const auto toks = tokens(get_string(section, key));
  if (toks.empty()) {
    throw std::invalid_argument(origin_ + ": [" + section + "] " + key +
                                " must hold at least one number");
  }
  Vec v(static_cast<Eigen::Index>(toks.size()));
  for (size_t i = 0; i < toks.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] =
        parse_double(toks[i], "[" + section + "] " + key);
  }
  return v;
}

Mat ConfigFile::get_matrix(const std::string& section,
                           const std::string& key) const {
  const std::string raw = get_string(section, key);
  std::vector<std::vector<double>> rows;
  std::string row_text;
  std::istringstream in(raw);
  while (std::getline(in, row_text, ';')) {
    const auto toks = tokens(row_text);
    if (toks.empty()) continue;
    std::vector<double> row;
    for (const auto& t : toks) {
      row.push_back(parse_double(t, "[" + section + "] " + key));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw std::invalid_argument(origin_ + ": [" + section + "] " + key +
                                " must hold a matrix (rows split by ';')");
  }
  const size_t cols = rows.front().size();
  Mat m(static_cast<Eigen::Index>(rows.size()),
        static_cast<Eigen::Index>(cols));
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) {
      throw std::invalid_argument(origin_ + ": [" + section + "] " + key +
                                  " has ragged rows");
    }
    for (size_t j = 0; j < cols; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rows[i][j];
    }
  }
  return m;
}

std::string ConfigFile::get_string_or(const std::string& section,
                                      const std::string& key,
                                      const std::string& fallback) const {
  return has(section, key) ? get_string(section, key) : fallback;
}

double ConfigFile::get_double_or(const std::string& section,
                                 const std::string& key,
                                 double fallback) const {
  return has(section, key) ? get_double(section, key) : fallback;
}

long ConfigFile::get_long_or(const std::string& section, const std::string& key,
                             long fallback) const {
  return has(section, key) ? get_long(section, key) : fallback;
}

std::optional<double> ConfigFile::maybe_double(const std::string& section,
                                               const std::string& key) const {
  if (!has(section, key)) return std::nullopt;
  return get_double(section, key);
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  const ConfigFile file = ConfigFile::parse_file(path);
  ExperimentConfig cfg;
  cfg.config_hash = file.hash();

  // [plant]
  cfg.plant_name = file.get_string("plant", "name");
  cfg.R0 = file.get_double("plant", "R0");
  if (cfg.plant_name == "two_tank") {
    cfg.tank.a = file.get_double("plant", "a");
    cfg.tank.H = file.get_double("plant", "H");
    cfg.K = file.get_matrix("plant", "K");
    cfg.lure = lure_from_two_tank(cfg.tank, cfg.K, cfg.R0);
  } else if (cfg.plant_name == "lure") {
    const Mat A = file.get_matrix("plant", "A");
    const Mat B = file.get_matrix("plant", "B");
    cfg.K = file.get_matrix("plant", "K");
    const Vec xi = file.get_vector("plant", "xi");
    const Vec eta = file.get_vector("plant", "eta");
    const std::string phi_name = file.get_string("plant", "phi");
    std::vector<double> params;
    if (file.has("plant", "phi_params")) {
      const Vec pv = file.get_vector("plant", "phi_params");
      params.assign(pv.data(), pv.data() + pv.size());
    }
    cfg.lure = LurePlant(A, B, cfg.K, xi, eta,
                         nonlinearity_from_catalog(phi_name, params), cfg.R0);
  } else {
    throw std::invalid_argument("config: unknown plant '" + cfg.plant_name +
                                "' (expected two_tank or lure)");
  }

  // [certificate]
  cfg.c = file.get_double("certificate", "c");
  cfg.d1 = file.get_double_or("certificate", "d1", 0.0);
  if (file.has("certificate", "theta_cl")) {
    cfg.certify_opts.theta_cl = file.get_vector("certificate", "theta_cl");
  }
  if (file.has("certificate", "theta_op")) {
    cfg.certify_opts.theta_op = file.get_vector("certificate", "theta_op");
  }
  if (file.has("certificate", "kappa_decimals")) {
    const long d = file.get_long("certificate", "kappa_decimals");
    if (d < 0) {
      cfg.certify_opts.kappa.round_decimals = std::nullopt;  // exact
    } else {
      cfg.certify_opts.kappa.round_decimals = static_cast<int>(d);
    }
  }
  cfg.certify_opts.sigma0 = file.get_double_or("certificate", "sigma0", 1.0);
  if (file.has("certificate", "file")) {
    cfg.certificate_file = file.get_string("certificate", "file");
  }

  // [simulation]
  const std::string scheme = file.get_string_or("simulation", "scheme", "log");
  if (scheme == "log") {
    cfg.scheme = Scheme::log_quant;
  } else if (scheme == "zoom") {
    cfg.scheme = Scheme::zoom_quant;
  } else {
    throw std::invalid_argument("config: scheme must be 'log' or 'zoom', got '" +
                                scheme + "'");
  }
  if (file.has_section("simulation")) {
    cfg.x0 = file.get_vector("simulation", "x0");
    cfg.horizon = file.get_double("simulation", "horizon");
    cfg.dt = file.get_double_or("simulation", "dt", 1e-5);
    cfg.dt_pred = file.get_double_or("simulation", "dt_pred", 1e-4);
  }

  // [log]
  cfg.has_log = file.has_section("log");
  if (cfg.has_log) {
    cfg.rho = file.get_double("log", "rho");
    cfg.sigma_log = file.get_double("log", "sigma");
    cfg.tau_max = file.get_double("log", "tau_max");
    cfg.chi0 = file.maybe_double("log", "chi0");
    cfg.lambda = file.maybe_double("log", "lambda");
    if (file.has("log", "allowed_times")) {
      const Vec v = file.get_vector("log", "allowed_times");
      std::vector<double> s(v.data(), v.data() + v.size());
      std::sort(s.begin(), s.end());
      cfg.allowed_times = std::move(s);
    }
  }

  // [zoom]
  cfg.has_zoom = file.has_section("zoom");
  if (cfg.has_zoom) {
    cfg.zoom_range = file.get_double("zoom", "M");
    cfg.zoom_error = file.get_double("zoom", "Delta");
    cfg.mu0 = file.get_double("zoom", "mu0");
    cfg.h = file.get_double("zoom", "h");
    cfg.ell_max = static_cast<int>(file.get_long("zoom", "ell_max"));
    cfg.sigma_zoom = file.get_double("zoom", "sigma");
  }

  if (file.has_section("simulation")) {
    if (cfg.scheme == Scheme::log_quant && !cfg.has_log) {
      throw std::invalid_argument(
          "config: scheme = log requires a [log] section");
    }
    if (cfg.scheme == Scheme::zoom_quant && !cfg.has_zoom) {
      throw std::invalid_argument(
          "config: scheme = zoom requires a [zoom] section");
    }
  }

  // [region]
  cfg.region_rho_lo = file.get_double_or("region", "rho_min", 0.02);
  cfg.region_rho_hi = file.get_double_or("region", "rho_max", 0.999);
  cfg.region_steps =
      static_cast<int>(file.get_long_or("region", "steps", 200));
  if (cfg.region_steps < 2 || !(cfg.region_rho_lo > 0.0) ||
      !(cfg.region_rho_hi < 1.0) || cfg.region_rho_lo >= cfg.region_rho_hi) {
    throw std::invalid_argument(
        "config: [region] requires 0 < rho_min < rho_max < 1 and steps >= 2");
  }

  cfg.out_dir = file.get_string_or("output", "dir", "out");
  cfg.seed = static_cast<uint64_t>(file.get_long_or("output", "seed", 0));
  return cfg;
}

const LurePlant& ExperimentConfig::plant() const {
  if (!lure) throw std::logic_error("config holds no plant");
  return *lure;
}

Certificate ExperimentConfig::build_certificate() const {
  if (certificate_file) {
    return certificate_from_file(*certificate_file);
  }
  return certify_lure(plant(), c, d1, certify_opts);
}

LogQuantizer ExperimentConfig::make_log_quantizer(
    const Certificate& cert) const {
  return LogQuantizer::design(rho, cert, chi0);
}

StmLogConfig ExperimentConfig::make_log_stm(const Certificate& cert,
                                            const LogQuantizer& quant) const {
  StmLogConfig stm;
  stm.sigma = sigma_log;
  stm.tau_max = tau_max;
  stm.lambda = lambda.value_or(lambda0_log(quant, cert) + 1e-4);
  stm.allowed_times = allowed_times;
  stm.dt_pred = dt_pred;
  stm.validate(quant, cert);
  return stm;
}

ZoomQuantizer ExperimentConfig::make_zoom_quantizer(
    const Certificate& cert) const {
  return ZoomQuantizer::design(zoom_range, zoom_error, mu0, cert);
}

StmZoomConfig ExperimentConfig::make_zoom_stm() const {
  StmZoomConfig stm;
  stm.sigma = sigma_zoom;
  stm.h = h;
  stm.ell_max = ell_max;
  stm.dt_pred = dt_pred;
  return stm;
}

std::string certificate_to_text(const Certificate& cert,
                                uint64_t config_hash) {
  std::ostringstream out;
  out << "# certificate written by stq (full precision)\n";
  out << "# config_hash=" << hash_hex(config_hash) << "\n";
  out << "[certificate_data]\n";
  auto put = [&out](const char* key, double v) {
    out << key << " = " << format_double(v) << "\n";
  };
  auto put_vec = [&out](const char* key, const Vec& v) {
    out << key << " =";
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      out << " " << format_double(v[i]);
    }
    out << "\n";
  };
  put("c", cert.c);
  put("d1", cert.d1);
  put("d2", cert.d2);
  put_vec("theta_cl", cert.theta_cl);
  put_vec("theta_op", cert.theta_op);
  put("kappa_min", cert.kappa_min);
  put("kappa_max", cert.kappa_max);
  put("R0", cert.R0);
  put("R1", cert.R1);
  put("R2", cert.R2);
  put("Gamma", cert.Gamma);
  put("R", cert.R);
  put("alpha", cert.alpha);
  put("sigma0", cert.sigma0);
  put("L_cl", cert.L_cl);
  put("L_op", cert.L_op);
  put("L_cl2", cert.L_cl2);
  return out.str();
}

Certificate certificate_from_file(const std::string& path) {
  const ConfigFile file = ConfigFile::parse_file(path);
  const std::string sec = "certificate_data";
  if (!file.has_section(sec)) {
    throw std::invalid_argument("'" + path +
                                "' is not a certificate file (missing "
                                "[certificate_data])");
  }
  Certificate cert;
  cert.c = file.get_double(sec, "c");
  cert.d1 = file.get_double(sec, "d1");
  cert.d2 = file.get_double(sec, "d2");
  cert.theta_cl = file.get_vector(sec, "theta_cl");
  cert.theta_op = file.get_vector(sec, "theta_op");
  cert.kappa_min = file.get_double(sec, "kappa_min");
  cert.kappa_max = file.get_double(sec, "kappa_max");
  cert.R0 = file.get_double(sec, "R0");
  cert.R1 = file.get_double(sec, "R1");
  cert.R2 = file.get_double(sec, "R2");
  cert.Gamma = file.get_double(sec, "Gamma");
  cert.R = file.get_double(sec, "R");
  cert.alpha = file.get_double(sec, "alpha");
  cert.sigma0 = file.get_double(sec, "sigma0");
  cert.L_cl = file.get_double_or(sec, "L_cl", 1.0);
  cert.L_op = file.get_double_or(sec, "L_op", 1.0);
  cert.L_cl2 = file.get_double_or(sec, "L_cl2", 1.0);
  return cert;
}

} // namespace stq
