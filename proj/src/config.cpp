#include "fluxchemo/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "fluxchemo/errors.hpp"

namespace fluxchemo {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_real(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw ConfigError("key '" + key + "': '" + text + "' is not a number");
  }
  return v;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ConfigMap parse_config(const std::string& text) {
  ConfigMap m;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    if (!m.emplace(key, value).second) {
      throw ConfigError("config line " + std::to_string(lineno) + ": repeated key '" + key + "'");
    }
  }
  return m;
}

ConfigMap read_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

double config_real(const ConfigMap& m, const std::string& key) {
  auto it = m.find(key);
  if (it == m.end()) throw ConfigError("missing key '" + key + "'");
  return parse_real(key, it->second);
}

double config_real(const ConfigMap& m, const std::string& key, double fallback) {
  auto it = m.find(key);
  return it == m.end() ? fallback : parse_real(key, it->second);
}

std::string config_string(const ConfigMap& m, const std::string& key,
                          const std::string& fallback) {
  auto it = m.find(key);
  return it == m.end() ? fallback : it->second;
}

Params params_from_config(const ConfigMap& m, const std::set<std::string>& ignore) {
  const std::string units = config_string(m, "units", "dimensionless");
  const std::string regime = config_string(m, "regime", "enforce");
  if (regime != "enforce" && regime != "skip") {
    throw ConfigError("regime must be 'enforce' or 'skip'");
  }
  const RegimeCheck check = regime == "skip" ? RegimeCheck::skip : RegimeCheck::enforce;

  std::set<std::string> known{"units", "regime"};
  auto check_keys = [&] {
    for (const auto& [key, value] : m) {
      if (!known.count(key) && !ignore.count(key)) {
        throw ConfigError("unknown key '" + key + "' for units = " + units);
      }
    }
  };

  if (units == "physical") {
    known.insert({"kappa", "chi", "v0", "eps", "a", "sigma", "theta", "l", "L", "M0", "beta",
                  "delta"});
    check_keys();
    PhysicalParams pp;
    pp.kappa = config_real(m, "kappa", pp.kappa);
    pp.chi = config_real(m, "chi");
    pp.v0 = config_real(m, "v0");
    pp.eps = config_real(m, "eps");
    pp.a = config_real(m, "a", pp.a);
    pp.sigma = config_real(m, "sigma", pp.sigma);
    pp.theta = config_real(m, "theta");
    pp.l = config_real(m, "l", pp.l);
    pp.L = config_real(m, "L");
    pp.M0 = config_real(m, "M0");
    pp.beta = config_real(m, "beta", pp.v0 / pp.chi);
    pp.delta = config_real(m, "delta", pp.beta / 10.0);
    return rescale(pp, check);
  }
  if (units != "dimensionless") {
    throw ConfigError("units must be 'dimensionless' or 'physical' (got '" + units + "')");
  }
  known.insert({"chi", "gamma", "v0", "eps", "theta", "sigma", "M0", "L", "delta", "delta0"});
  check_keys();
  const double theta = config_real(m, "theta");
  const double sigma = config_real(m, "sigma", 1.0);
  const bool has_chi = m.count("chi") > 0;
  const bool has_gamma = m.count("gamma") > 0;
  if (has_chi == has_gamma) throw ConfigError("give exactly one of 'chi' and 'gamma'");
  const double chi = has_chi ? config_real(m, "chi") : config_real(m, "gamma") * sigma / theta;
  std::optional<double> delta;
  if (m.count("delta")) delta = config_real(m, "delta");
  return Params::make(chi, config_real(m, "v0"), config_real(m, "eps"), theta, sigma,
                      config_real(m, "M0"), config_real(m, "L"), delta,
                      config_real(m, "delta0", 0.05), check);
}

std::string params_to_config(const Params& p) {
  std::ostringstream os;
  os << "units = dimensionless\n"
     << "chi = " << fmt(p.chi) << "\n"
     << "v0 = " << fmt(p.v0) << "\n"
     << "eps = " << fmt(p.eps) << "\n"
     << "theta = " << fmt(p.theta) << "\n"
     << "sigma = " << fmt(p.sigma) << "\n"
     << "M0 = " << fmt(p.M0) << "\n"
     << "L = " << fmt(p.L) << "\n"
     << "delta = " << fmt(p.delta) << "\n"
     << "delta0 = " << fmt(p.delta0) << "\n"
     << "regime = " << (regime_violation(p).empty() ? "enforce" : "skip") << "\n";
  return os.str();
}

}  // namespace fluxchemo
