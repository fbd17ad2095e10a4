#include "osmoflow/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "osmoflow/common.hpp"

namespace osmoflow {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  size_t b = s.find_last_not_of(" \t\r");
  if (a == std::string::npos) return "";
  return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(int line, const std::string& what) {
  throw ConfigError("config line " + std::to_string(line) + ": " + what);
}

struct Field {
  enum Kind { Double, Int, ULong, String } kind;
  void* target;
};

double parse_double(const std::string& v, int line) {
  try {
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) fail(line, "trailing characters in number '" + v + "'");
    return x;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    fail(line, "expected a number, got '" + v + "'");
  }
}

long long parse_int(const std::string& v, int line) {
  long long x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size())
    fail(line, "expected an integer, got '" + v + "'");
  return x;
}

}  // namespace

void RunConfig::validate() const {
  try {
    params.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("invalid [params]: ") + e.what());
  }
  auto check = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError("invalid config: " + what);
  };
  check(n_inner >= 8, "grids.n_inner must be >= 8");
  check(n_outer >= 8, "grids.n_outer must be >= 8");
  check(stokes_n >= 8, "grids.stokes_n must be >= 8");
  check(k_max >= 1, "spectrum.k_max must be >= 1");
  check(tol_zero > 0, "spectrum.tol_zero must be > 0");
  check(spurious_rel > 0, "spectrum.spurious_rel must be > 0");
  check(bc_tol > 0, "tolerances.bc_tol must be > 0");
  check(dt >= 0, "dynamics.dt must be >= 0");
  check(t_final > 0, "dynamics.t_final must be > 0");
  check(sample_every >= 1, "dynamics.sample_every must be >= 1");
  check(!out_dir.empty(), "run.out_dir must not be empty");
}

std::string RunConfig::canonical() const {
  std::ostringstream os;
  os << "params.nu_plus=" << dtos(params.nu_plus) << '\n'
     << "params.nu_minus=" << dtos(params.nu_minus) << '\n'
     << "params.kappa_plus=" << dtos(params.kappa_plus) << '\n'
     << "params.kappa_minus=" << dtos(params.kappa_minus) << '\n'
     << "params.ctilde_plus=" << dtos(params.ctilde_plus) << '\n'
     << "params.ctilde_minus=" << dtos(params.ctilde_minus) << '\n'
     << "params.r_container=" << dtos(params.R_container) << '\n'
     << "grids.n_inner=" << n_inner << '\n'
     << "grids.n_outer=" << n_outer << '\n'
     << "grids.stokes_n=" << stokes_n << '\n'
     << "spectrum.k_max=" << k_max << '\n'
     << "spectrum.tol_zero=" << dtos(tol_zero) << '\n'
     << "spectrum.spurious_rel=" << dtos(spurious_rel) << '\n'
     << "tolerances.bc_tol=" << dtos(bc_tol) << '\n'
     << "dynamics.dt=" << dtos(dt) << '\n'
     << "dynamics.t_final=" << dtos(t_final) << '\n'
     << "dynamics.sample_every=" << sample_every << '\n'
     << "run.seed=" << seed << '\n';
  // run.out_dir is deliberately excluded: the hash fingerprints the
  // computation, and rerouting the output must not change the provenance
  // stamp embedded in otherwise identical results.
  return os.str();
}

std::string RunConfig::hash() const { return hex64(fnv1a64(canonical())); }

RunConfig parse_run_config(const std::string& text) {
  RunConfig cfg;

  std::map<std::string, Field> schema = {
      {"params.nu_plus", {Field::Double, &cfg.params.nu_plus}},
      {"params.nu_minus", {Field::Double, &cfg.params.nu_minus}},
      {"params.kappa_plus", {Field::Double, &cfg.params.kappa_plus}},
      {"params.kappa_minus", {Field::Double, &cfg.params.kappa_minus}},
      {"params.ctilde_plus", {Field::Double, &cfg.params.ctilde_plus}},
      {"params.ctilde_minus", {Field::Double, &cfg.params.ctilde_minus}},
      {"params.r_container", {Field::Double, &cfg.params.R_container}},
      {"grids.n_inner", {Field::Int, &cfg.n_inner}},
      {"grids.n_outer", {Field::Int, &cfg.n_outer}},
      {"grids.stokes_n", {Field::Int, &cfg.stokes_n}},
      {"spectrum.k_max", {Field::Int, &cfg.k_max}},
      {"spectrum.tol_zero", {Field::Double, &cfg.tol_zero}},
      {"spectrum.spurious_rel", {Field::Double, &cfg.spurious_rel}},
      {"tolerances.bc_tol", {Field::Double, &cfg.bc_tol}},
      {"dynamics.dt", {Field::Double, &cfg.dt}},
      {"dynamics.t_final", {Field::Double, &cfg.t_final}},
      {"dynamics.sample_every", {Field::Int, &cfg.sample_every}},
      {"run.seed", {Field::ULong, &cfg.seed}},
      {"run.out_dir", {Field::String, &cfg.out_dir}},
  };
  const std::map<std::string, bool> known_sections = {
      {"params", true},    {"grids", true},    {"spectrum", true},
      {"tolerances", true}, {"dynamics", true}, {"run", true},
  };

  std::istringstream in(text);
  std::string raw, section;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    // strip comments (the subset has no '#' inside strings except quoted)
    bool in_quote = false;
    for (size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') in_quote = !in_quote;
      if (line[i] == '#' && !in_quote) {
        line = line.substr(0, i);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') fail(lineno, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!known_sections.count(section))
        fail(lineno, "unknown section [" + section + "]");
      continue;
    }

    const size_t eq = line.find('=');
    if (eq == std::string::npos) fail(lineno, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(lineno, "empty key");
    if (section.empty()) fail(lineno, "key '" + key + "' outside any section");
    const std::string full = section + "." + key;
    const auto it = schema.find(full);
    if (it == schema.end()) fail(lineno, "unknown key '" + full + "'");

    switch (it->second.kind) {
      case Field::Double:
        *static_cast<double*>(it->second.target) = parse_double(value, lineno);
        break;
      case Field::Int: {
        const long long v = parse_int(value, lineno);
        if (v < INT32_MIN || v > INT32_MAX) fail(lineno, "integer out of range");
        *static_cast<int*>(it->second.target) = static_cast<int>(v);
        break;
      }
      case Field::ULong: {
        const long long v = parse_int(value, lineno);
        if (v < 0) fail(lineno, "seed must be nonnegative");
        *static_cast<unsigned long long*>(it->second.target) =
            static_cast<unsigned long long>(v);
        break;
      }
      case Field::String: {
        if (value.size() < 2 || value.front() != '"' || value.back() != '"')
          fail(lineno, "expected a double-quoted string");
        *static_cast<std::string*>(it->second.target) =
            value.substr(1, value.size() - 2);
        break;
      }
    }
  }

  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str());
}

}  // namespace osmoflow
