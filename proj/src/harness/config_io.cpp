// SPDX-License-Identifier: Apache-2.0
#include "starris/harness/config_io.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <stdexcept>

#include "starris/units.hpp"

namespace starris::harness {

using nlohmann::json;

void ExperimentSpec::validate() const {
  if (trials < 1)
    throw std::invalid_argument("experiment.trials: must be >= 1");
  if (m_grid.empty()) throw std::invalid_argument("experiment.m_grid: empty");
  if (n_grid.empty()) throw std::invalid_argument("experiment.n_grid: empty");
  if (p_bs_max_dbm_grid.empty())
    throw std::invalid_argument("experiment.p_bs_max_dbm_grid: empty");
  if (omega_grid.empty())
    throw std::invalid_argument("experiment.omega_grid: empty");
  if (schemes.empty())
    throw std::invalid_argument("experiment.schemes: empty");
  if (jobs < 0) throw std::invalid_argument("experiment.jobs: must be >= 0");
}

const char* to_string(ExperimentSpec::Kind k) {
  switch (k) {
    case ExperimentSpec::Kind::convergence: return "convergence";
    case ExperimentSpec::Kind::re_vs_m: return "re_vs_m";
    case ExperimentSpec::Kind::se_ee_tradeoff: return "se_ee_tradeoff";
    case ExperimentSpec::Kind::single_solve: return "single_solve";
  }
  return "?";
}

ExperimentSpec::Kind kind_from_string(const std::string& name) {
  for (auto k : {ExperimentSpec::Kind::convergence,
                 ExperimentSpec::Kind::re_vs_m,
                 ExperimentSpec::Kind::se_ee_tradeoff,
                 ExperimentSpec::Kind::single_solve})
    if (name == to_string(k)) return k;
  throw std::invalid_argument("unknown experiment kind: " + name);
}

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw std::invalid_argument("config." + where + ": " + what);
}

// rejects unknown keys so typos never silently fall back to defaults
void check_keys(const json& j, const std::string& where,
                const std::set<std::string>& allowed) {
  if (!j.is_object()) fail(where, "expected an object");
  for (const auto& [key, value] : j.items())
    if (allowed.find(key) == allowed.end())
      fail(where, "unknown key '" + key + "'");
}

double get_num(const json& j, const std::string& where, const std::string& key,
               double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) fail(where + "." + key, "expected a number");
  return j.at(key).get<double>();
}

int get_int(const json& j, const std::string& where, const std::string& key,
            int fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_integer())
    fail(where + "." + key, "expected an integer");
  return j.at(key).get<int>();
}

// power fields accept either `<key>_dbm` or `<key>_w`, never both
double get_power(const json& j, const std::string& where,
                 const std::string& key, double fallback_w) {
  const std::string kd = key + "_dbm";
  const std::string kw = key + "_w";
  if (j.contains(kd) && j.contains(kw))
    fail(where + "." + key, "give either _dbm or _w, not both");
  if (j.contains(kd)) {
    if (!j.at(kd).is_number()) fail(where + "." + kd, "expected a number");
    return dbm_to_watt(j.at(kd).get<double>());
  }
  if (j.contains(kw)) {
    if (!j.at(kw).is_number()) fail(where + "." + kw, "expected a number");
    return j.at(kw).get<double>();
  }
  return fallback_w;
}

}  // namespace

ScenarioConfig default_config() {
  ScenarioConfig cfg;  // SystemConfig/GeometryConfig defaults are the paper scenario
  cfg.omega_tracks_p_max = true;
  cfg.refresh_omega();
  // omega sweep grid: multiples of the full power budget, including the
  // EE-only point
  cfg.experiment.omega_grid.clear();
  const double pmax = cfg.system.p_max();
  for (double f : {0.0, 1.0 / 16, 1.0 / 4, 1.0, 4.0, 16.0})
    cfg.experiment.omega_grid.push_back(f * pmax);
  return cfg;
}

ScenarioConfig config_from_json(const json& j) {
  ScenarioConfig cfg = default_config();
  check_keys(j, "", {"system", "geometry", "experiment", "solver"});

  if (j.contains("system")) {
    const json& js = j.at("system");
    check_keys(js, "system",
               {"n_antennas", "n_ris_elements", "n_users", "users_per_side",
                "p_bs_max_dbm", "p_bs_max_w", "p_ris_max_dbm", "p_ris_max_w",
                "r_min", "rho_max", "kappa_b", "kappa_u", "noise_dbm",
                "noise_w", "ris_noise_dbm", "ris_noise_w", "amp_efficiency",
                "element_power_dbm", "element_power_w", "static_power_dbm",
                "static_power_w", "bandwidth_hz", "omega", "epsilon",
                "inner_tol", "ris_mode"});
    SystemConfig& s = cfg.system;
    s.n_antennas = get_int(js, "system", "n_antennas", s.n_antennas);
    s.n_elements = get_int(js, "system", "n_ris_elements", s.n_elements);
    s.n_users = get_int(js, "system", "n_users", s.n_users);
    if (js.contains("users_per_side")) {
      const json& ups = js.at("users_per_side");
      if (!ups.is_array() || ups.size() != 2)
        fail("system.users_per_side", "expected [transmission, reflection]");
      const int nt = ups[0].get<int>();
      const int nr = ups[1].get<int>();
      if (nt + nr != s.n_users)
        fail("system.users_per_side", "counts must sum to n_users");
      s.user_sides.assign(nt, Side::transmission);
      s.user_sides.insert(s.user_sides.end(), nr, Side::reflection);
    } else if (s.n_users != static_cast<int>(s.user_sides.size())) {
      const int nt = (s.n_users + 1) / 2;
      s.user_sides.assign(nt, Side::transmission);
      s.user_sides.insert(s.user_sides.end(), s.n_users - nt,
                          Side::reflection);
    }
    s.p_bs_max = get_power(js, "system", "p_bs_max", s.p_bs_max);
    s.p_ris_max = get_power(js, "system", "p_ris_max", s.p_ris_max);
    s.r_min = get_num(js, "system", "r_min", s.r_min);
    s.rho_max = get_num(js, "system", "rho_max", s.rho_max);
    s.kappa_b = get_num(js, "system", "kappa_b", s.kappa_b);
    s.kappa_u = get_num(js, "system", "kappa_u", s.kappa_u);
    s.sigma2 = get_power(js, "system", "noise", s.sigma2);
    s.sigma_a2 = get_power(js, "system", "ris_noise", s.sigma_a2);
    s.xi = get_num(js, "system", "amp_efficiency", s.xi);
    s.p_r = get_power(js, "system", "element_power", s.p_r);
    s.p_c = get_power(js, "system", "static_power", s.p_c);
    s.bandwidth = get_num(js, "system", "bandwidth_hz", s.bandwidth);
    s.epsilon = get_num(js, "system", "epsilon", s.epsilon);
    s.inner_tol = get_num(js, "system", "inner_tol", s.inner_tol);
    if (js.contains("ris_mode")) {
      const std::string mode = js.at("ris_mode").get<std::string>();
      if (mode == "active")
        s.ris_mode = RisMode::active;
      else if (mode == "passive")
        s.ris_mode = RisMode::passive;
      else
        fail("system.ris_mode", "expected 'active' or 'passive'");
      if (s.ris_mode == RisMode::passive) s.sigma_a2 = 0.0;
    }
    if (js.contains("omega")) {
      if (js.at("omega").is_string()) {
        if (js.at("omega").get<std::string>() != "p_max")
          fail("system.omega", "expected a number or 'p_max'");
        cfg.omega_tracks_p_max = true;
      } else if (js.at("omega").is_number()) {
        cfg.omega_tracks_p_max = false;
        s.omega = js.at("omega").get<double>();
      } else {
        fail("system.omega", "expected a number or 'p_max'");
      }
    }
  }

  if (j.contains("geometry")) {
    const json& jg = j.at("geometry");
    check_keys(jg, "geometry",
               {"bs_position", "ris_position", "user_drop_radius_m", "pl0_db",
                "pl_exp_bs_ris", "pl_exp_ris_user", "rician_k_db_bs_ris",
                "rician_k_db_ris_user", "ris_rows"});
    GeometryConfig& g = cfg.geometry;
    auto get_pos = [&](const std::string& key, Eigen::Vector3d fallback) {
      if (!jg.contains(key)) return fallback;
      const json& arr = jg.at(key);
      if (!arr.is_array() || (arr.size() != 2 && arr.size() != 3))
        fail("geometry." + key, "expected [x, y] or [x, y, z]");
      Eigen::Vector3d out(arr[0].get<double>(), arr[1].get<double>(),
                          arr.size() == 3 ? arr[2].get<double>() : 0.0);
      return out;
    };
    g.bs_position = get_pos("bs_position", g.bs_position);
    g.ris_position = get_pos("ris_position", g.ris_position);
    g.user_drop_radius =
        get_num(jg, "geometry", "user_drop_radius_m", g.user_drop_radius);
    g.pl0_db = get_num(jg, "geometry", "pl0_db", g.pl0_db);
    g.pl_exp_bs_ris = get_num(jg, "geometry", "pl_exp_bs_ris", g.pl_exp_bs_ris);
    g.pl_exp_ris_user =
        get_num(jg, "geometry", "pl_exp_ris_user", g.pl_exp_ris_user);
    g.rician_k_db_bs_ris =
        get_num(jg, "geometry", "rician_k_db_bs_ris", g.rician_k_db_bs_ris);
    g.rician_k_db_ris_user = get_num(jg, "geometry", "rician_k_db_ris_user",
                                     g.rician_k_db_ris_user);
    g.ris_rows = get_int(jg, "geometry", "ris_rows", g.ris_rows);
  }

  if (j.contains("experiment")) {
    const json& je = j.at("experiment");
    check_keys(je, "experiment",
               {"kind", "m_grid", "n_grid", "p_bs_max_dbm_grid", "omega_grid",
                "trials", "master_seed", "schemes", "out_dir", "jobs"});
    ExperimentSpec& e = cfg.experiment;
    if (je.contains("kind"))
      e.kind = kind_from_string(je.at("kind").get<std::string>());
    if (je.contains("m_grid")) e.m_grid = je.at("m_grid").get<std::vector<int>>();
    if (je.contains("n_grid")) e.n_grid = je.at("n_grid").get<std::vector<int>>();
    if (je.contains("p_bs_max_dbm_grid"))
      e.p_bs_max_dbm_grid =
          je.at("p_bs_max_dbm_grid").get<std::vector<double>>();
    if (je.contains("omega_grid"))
      e.omega_grid = je.at("omega_grid").get<std::vector<double>>();
    e.trials = get_int(je, "experiment", "trials", e.trials);
    if (je.contains("master_seed"))
      e.master_seed = je.at("master_seed").get<std::uint64_t>();
    if (je.contains("schemes")) {
      e.schemes.clear();
      for (const auto& name : je.at("schemes"))
        e.schemes.push_back(scheme_from_string(name.get<std::string>()));
    }
    if (je.contains("out_dir")) e.out_dir = je.at("out_dir").get<std::string>();
    e.jobs = get_int(je, "experiment", "jobs", e.jobs);
  }

  if (j.contains("solver")) {
    const json& jo = j.at("solver");
    check_keys(jo, "solver",
               {"max_outer", "max_inner", "n_randomizations", "conic_tol",
                "verbosity"});
    SolverOptions& o = cfg.solver;
    o.max_outer = get_int(jo, "solver", "max_outer", o.max_outer);
    o.max_inner = get_int(jo, "solver", "max_inner", o.max_inner);
    o.n_randomizations =
        get_int(jo, "solver", "n_randomizations", o.n_randomizations);
    o.conic_tol = get_num(jo, "solver", "conic_tol", o.conic_tol);
    o.verbosity = get_int(jo, "solver", "verbosity", o.verbosity);
  }

  cfg.refresh_omega();
  cfg.system.validate();
  cfg.geometry.validate();
  cfg.experiment.validate();
  return cfg;
}

json config_to_json(const ScenarioConfig& cfg) {
  json j;
  const SystemConfig& s = cfg.system;
  int nt = 0;
  for (Side side : s.user_sides)
    if (side == Side::transmission) ++nt;
  j["system"] = {
      {"n_antennas", s.n_antennas},
      {"n_ris_elements", s.n_elements},
      {"n_users", s.n_users},
      {"users_per_side", {nt, s.n_users - nt}},
      {"p_bs_max_w", s.p_bs_max},
      {"p_ris_max_w", s.p_ris_max},
      {"r_min", s.r_min},
      {"rho_max", s.rho_max},
      {"kappa_b", s.kappa_b},
      {"kappa_u", s.kappa_u},
      {"noise_w", s.sigma2},
      {"ris_noise_w", s.sigma_a2},
      {"amp_efficiency", s.xi},
      {"element_power_w", s.p_r},
      {"static_power_w", s.p_c},
      {"bandwidth_hz", s.bandwidth},
      {"epsilon", s.epsilon},
      {"inner_tol", s.inner_tol},
      {"ris_mode", s.ris_mode == RisMode::active ? "active" : "passive"},
  };
  if (cfg.omega_tracks_p_max)
    j["system"]["omega"] = "p_max";
  else
    j["system"]["omega"] = s.omega;

  const GeometryConfig& g = cfg.geometry;
  j["geometry"] = {
      {"bs_position", {g.bs_position.x(), g.bs_position.y(), g.bs_position.z()}},
      {"ris_position",
       {g.ris_position.x(), g.ris_position.y(), g.ris_position.z()}},
      {"user_drop_radius_m", g.user_drop_radius},
      {"pl0_db", g.pl0_db},
      {"pl_exp_bs_ris", g.pl_exp_bs_ris},
      {"pl_exp_ris_user", g.pl_exp_ris_user},
      {"rician_k_db_bs_ris", g.rician_k_db_bs_ris},
      {"rician_k_db_ris_user", g.rician_k_db_ris_user},
      {"ris_rows", g.ris_rows},
  };

  const ExperimentSpec& e = cfg.experiment;
  json schemes = json::array();
  for (Scheme sc : e.schemes) schemes.push_back(to_string(sc));
  j["experiment"] = {
      {"kind", to_string(e.kind)},
      {"m_grid", e.m_grid},
      {"n_grid", e.n_grid},
      {"p_bs_max_dbm_grid", e.p_bs_max_dbm_grid},
      {"omega_grid", e.omega_grid},
      {"trials", e.trials},
      {"master_seed", e.master_seed},
      {"schemes", schemes},
      {"out_dir", e.out_dir},
      {"jobs", e.jobs},
  };

  const SolverOptions& o = cfg.solver;
  j["solver"] = {
      {"max_outer", o.max_outer},
      {"max_inner", o.max_inner},
      {"n_randomizations", o.n_randomizations},
      {"conic_tol", o.conic_tol},
      {"verbosity", o.verbosity},
  };
  return j;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("config parse error in " + path + ": " + e.what());
  }
  return config_from_json(j);
}

void save_config(const ScenarioConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write config file: " + path);
  out << config_to_json(cfg).dump(2) << "\n";
}

}  // namespace starris::harness
