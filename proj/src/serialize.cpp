#include "osmoflow/serialize.hpp"

#include <fstream>
#include <stdexcept>

namespace osmoflow {

using nlohmann::json;

namespace {

json vec_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Eigen::VectorXd vec_from_json(const json& a) {
  if (!a.is_array()) throw std::invalid_argument("expected JSON array of numbers");
  Eigen::VectorXd v(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<int>(i)] = a[i].get<double>();
  return v;
}

}  // namespace

json to_json(const RadialGrid& g) {
  return json{{"family", g.family == GridFamily::Uniform ? "uniform" : "chebyshev"},
              {"lo", g.lo},
              {"hi", g.hi},
              {"nodes", vec_to_json(g.nodes)}};
}

RadialGrid grid_from_json(const json& j) {
  RadialGrid g;
  const std::string fam = j.at("family").get<std::string>();
  if (fam == "uniform")
    g.family = GridFamily::Uniform;
  else if (fam == "chebyshev")
    g.family = GridFamily::Chebyshev;
  else
    throw std::invalid_argument("unknown grid family: " + fam);
  g.lo = j.at("lo").get<double>();
  g.hi = j.at("hi").get<double>();
  g.nodes = vec_from_json(j.at("nodes"));
  g.validate();
  return g;
}

json to_json(const RadialState& s) {
  return json{{"R", s.R},
              {"t", s.t},
              {"inner", {{"grid", to_json(s.c.inner_grid)}, {"values", vec_to_json(s.c.inner_values)}}},
              {"outer", {{"grid", to_json(s.c.outer_grid)}, {"values", vec_to_json(s.c.outer_values)}}}};
}

RadialState state_from_json(const json& j) {
  RadialState s;
  s.R = j.at("R").get<double>();
  s.t = j.at("t").get<double>();
  s.c.inner_grid = grid_from_json(j.at("inner").at("grid"));
  s.c.inner_values = vec_from_json(j.at("inner").at("values"));
  s.c.outer_grid = grid_from_json(j.at("outer").at("grid"));
  s.c.outer_values = vec_from_json(j.at("outer").at("values"));
  s.validate();
  return s;
}

json to_json(const PhysParams& p) {
  return json{{"nu_plus", p.nu_plus},
              {"nu_minus", p.nu_minus},
              {"kappa_plus", p.kappa_plus},
              {"kappa_minus", p.kappa_minus},
              {"ctilde_plus", p.ctilde_plus},
              {"ctilde_minus", p.ctilde_minus},
              {"R_container", p.R_container},
              {"dim", p.dim}};
}

PhysParams params_from_json(const json& j) {
  PhysParams p;
  p.nu_plus = j.value("nu_plus", p.nu_plus);
  p.nu_minus = j.value("nu_minus", p.nu_minus);
  p.kappa_plus = j.value("kappa_plus", p.kappa_plus);
  p.kappa_minus = j.value("kappa_minus", p.kappa_minus);
  p.ctilde_plus = j.value("ctilde_plus", p.ctilde_plus);
  p.ctilde_minus = j.value("ctilde_minus", p.ctilde_minus);
  p.R_container = j.value("R_container", p.R_container);
  p.dim = j.value("dim", p.dim);
  p.validate();
  return p;
}

void save_state(const RadialState& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << to_json(s).dump(2) << "\n";
}

RadialState load_state(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("malformed state file " + path + ": " + e.what());
  }
  return state_from_json(j);
}

}  // namespace osmoflow
