#include "usmsim/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace usmsim {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const char* where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) {
    throw ConfigError(std::string(where) + ": expected an object");
  }
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    bool known = false;
    for (const char* k : allowed) {
      if (key == k) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw ConfigError(std::string(where) + ": unknown key '" + key + "'");
    }
  }
}

double number(const json& obj, const char* where, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) {
    throw ConfigError(std::string(where) + "." + key + ": expected a number");
  }
  return v.get<double>();
}

bool boolean(const json& obj, const char* where, const char* key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) {
    throw ConfigError(std::string(where) + "." + key + ": expected a boolean");
  }
  return v.get<bool>();
}

Sinusoid parse_sinusoid(const json& obj, const char* where) {
  require_keys(obj, where, {"amplitude", "frequency", "phase"});
  Sinusoid s;
  s.amplitude = number(obj, where, "amplitude", 0.0);
  s.frequency = number(obj, where, "frequency", 0.0);
  s.phase = number(obj, where, "phase", 0.0);
  return s;
}

json dump_sinusoid(const Sinusoid& s) {
  return {{"amplitude", s.amplitude}, {"frequency", s.frequency}, {"phase", s.phase}};
}

std::vector<double> number_list(const json& obj, const char* where, const char* key,
                                std::vector<double> fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_array()) {
    throw ConfigError(std::string(where) + "." + key + ": expected an array of numbers");
  }
  std::vector<double> out;
  for (const json& item : v) {
    if (!item.is_number()) {
      throw ConfigError(std::string(where) + "." + key + ": expected numbers");
    }
    out.push_back(item.get<double>());
  }
  return out;
}

}  // namespace

void Config::validate() const {
  plant.validate();
  reference.validate();
  afosmc.validate();
  compensator.validate();
  baseline.validate();
  if (!(memory.length > 0.0)) {
    throw ConfigError("memory.length must be positive");
  }
  if (!(sim.dt > 0.0)) {
    throw ConfigError("sim.dt must be positive");
  }
  if (sim.quantize_position && !(sim.quantum > 0.0)) {
    throw ConfigError("sim.quantum must be positive");
  }
  if (table_frequencies.empty()) {
    throw ConfigError("table_frequencies must not be empty");
  }
  for (double f : table_frequencies) {
    if (!(f > 0.0)) throw ConfigError("table_frequencies must be positive");
  }
  for (double l : memory_sweep_lengths) {
    if (!(l > 0.0)) throw ConfigError("memory_sweep_lengths must be positive");
  }
  make_scenario(1).validate();
  make_scenario(2).validate();
  make_scenario(3).validate();
}

Scenario Config::make_scenario(int case_id) const {
  Scenario s;
  s.case_id = case_id;
  s.reference = reference;
  s.plant = plant;
  s.afosmc = afosmc;
  if (memory.unit == MemoryUnit::samples) {
    s.afosmc.window_capacity = static_cast<std::size_t>(memory.length);
    s.afosmc.memory_l = memory.length * sim.dt;
  } else {
    s.afosmc.window_capacity = 0;
    s.afosmc.memory_l = memory.length;
  }
  s.compensator = compensator;
  s.baseline = baseline;
  s.dt = sim.dt;
  s.settle_skip = sim.settle_skip;
  s.quantize_position = sim.quantize_position;
  s.quantum = sim.quantum;
  return s;
}

Config parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& err) {
    throw ConfigError(std::string("config is not valid JSON: ") + err.what());
  }
  require_keys(root, "config",
               {"plant", "reference", "afosmc", "compensator", "baselines", "memory", "sim",
                "table_frequencies", "memory_sweep_lengths"});

  Config cfg;

  if (root.contains("plant")) {
    const json& p = root.at("plant");
    require_keys(p, "plant", {"m_bar", "b_bar", "c_bar", "g_bar", "uncertainty"});
    cfg.plant.m_bar = number(p, "plant", "m_bar", cfg.plant.m_bar);
    cfg.plant.b_bar = number(p, "plant", "b_bar", cfg.plant.b_bar);
    cfg.plant.c_bar = number(p, "plant", "c_bar", cfg.plant.c_bar);
    cfg.plant.g_bar = number(p, "plant", "g_bar", cfg.plant.g_bar);
    if (p.contains("uncertainty")) {
      const json& u = p.at("uncertainty");
      require_keys(u, "plant.uncertainty", {"dm", "db", "dc", "dg", "friction"});
      if (u.contains("dm")) cfg.plant.uncertainty.dm = parse_sinusoid(u.at("dm"), "plant.uncertainty.dm");
      if (u.contains("db")) cfg.plant.uncertainty.db = parse_sinusoid(u.at("db"), "plant.uncertainty.db");
      if (u.contains("dc")) cfg.plant.uncertainty.dc = parse_sinusoid(u.at("dc"), "plant.uncertainty.dc");
      if (u.contains("dg")) cfg.plant.uncertainty.dg = parse_sinusoid(u.at("dg"), "plant.uncertainty.dg");
      if (u.contains("friction")) {
        const json& f = u.at("friction");
        require_keys(f, "plant.uncertainty.friction",
                     {"coulomb_level", "viscous_extra", "smoothing_width"});
        cfg.plant.uncertainty.friction.coulomb_level =
            number(f, "friction", "coulomb_level", cfg.plant.uncertainty.friction.coulomb_level);
        cfg.plant.uncertainty.friction.viscous_extra =
            number(f, "friction", "viscous_extra", cfg.plant.uncertainty.friction.viscous_extra);
        cfg.plant.uncertainty.friction.smoothing_width =
            number(f, "friction", "smoothing_width", cfg.plant.uncertainty.friction.smoothing_width);
      }
    }
  }

  if (root.contains("reference")) {
    const json& r = root.at("reference");
    require_keys(r, "reference", {"kind", "frequency", "amplitude", "duration"});
    if (r.contains("kind")) {
      const std::string kind = r.at("kind").get<std::string>();
      if (kind == "sine") {
        cfg.reference.kind = ReferenceKind::sine;
      } else if (kind == "triangle") {
        cfg.reference.kind = ReferenceKind::triangle;
      } else {
        throw ConfigError("reference.kind must be 'sine' or 'triangle'");
      }
    }
    cfg.reference.frequency = number(r, "reference", "frequency", cfg.reference.frequency);
    cfg.reference.amplitude = number(r, "reference", "amplitude", cfg.reference.amplitude);
    cfg.reference.duration = number(r, "reference", "duration", cfg.reference.duration);
  }

  if (root.contains("afosmc")) {
    const json& a = root.at("afosmc");
    require_keys(a, "afosmc",
                 {"lambda", "alpha", "k_p", "k_s", "l_bar", "k1", "epsilon0", "beta0",
                  "epsilon_floor"});
    cfg.afosmc.lambda = number(a, "afosmc", "lambda", cfg.afosmc.lambda);
    cfg.afosmc.alpha = number(a, "afosmc", "alpha", cfg.afosmc.alpha);
    cfg.afosmc.k_p = number(a, "afosmc", "k_p", cfg.afosmc.k_p);
    cfg.afosmc.k_s = number(a, "afosmc", "k_s", cfg.afosmc.k_s);
    cfg.afosmc.l_bar = number(a, "afosmc", "l_bar", cfg.afosmc.l_bar);
    cfg.afosmc.k1 = number(a, "afosmc", "k1", cfg.afosmc.k1);
    cfg.afosmc.epsilon0 = number(a, "afosmc", "epsilon0", cfg.afosmc.epsilon0);
    cfg.afosmc.beta0 = number(a, "afosmc", "beta0", cfg.afosmc.beta0);
    cfg.afosmc.epsilon_floor = number(a, "afosmc", "epsilon_floor", cfg.afosmc.epsilon_floor);
  }

  if (root.contains("compensator")) {
    const json& c = root.at("compensator");
    require_keys(c, "compensator", {"lambda1", "lambda2", "lambda3", "Q", "R", "kappa"});
    cfg.compensator.lambda1 = number(c, "compensator", "lambda1", cfg.compensator.lambda1);
    cfg.compensator.lambda2 = number(c, "compensator", "lambda2", cfg.compensator.lambda2);
    cfg.compensator.lambda3 = number(c, "compensator", "lambda3", cfg.compensator.lambda3);
    cfg.compensator.r_weight = number(c, "compensator", "R", cfg.compensator.r_weight);
    cfg.compensator.kappa = number(c, "compensator", "kappa", cfg.compensator.kappa);
    if (c.contains("Q")) {
      const json& q = c.at("Q");
      if (!q.is_array() || q.size() != 3) {
        throw ConfigError("compensator.Q must be a 3x3 array");
      }
      for (int i = 0; i < 3; ++i) {
        if (!q[i].is_array() || q[i].size() != 3) {
          throw ConfigError("compensator.Q must be a 3x3 array");
        }
        for (int j = 0; j < 3; ++j) {
          if (!q[i][j].is_number()) throw ConfigError("compensator.Q entries must be numbers");
          cfg.compensator.q_weight[i][j] = q[i][j].get<double>();
        }
      }
    }
  }

  if (root.contains("baselines")) {
    const json& b = root.at("baselines");
    require_keys(b, "baselines", {"pid", "smc", "dob_bandwidth"});
    if (b.contains("pid")) {
      const json& p = b.at("pid");
      require_keys(p, "baselines.pid", {"k_x1", "k_x2", "k_x3"});
      cfg.baseline.pid.k_x1 = number(p, "pid", "k_x1", cfg.baseline.pid.k_x1);
      cfg.baseline.pid.k_x2 = number(p, "pid", "k_x2", cfg.baseline.pid.k_x2);
      cfg.baseline.pid.k_x3 = number(p, "pid", "k_x3", cfg.baseline.pid.k_x3);
    }
    if (b.contains("smc")) {
      const json& s = b.at("smc");
      require_keys(s, "baselines.smc", {"lambda_y", "k_y1", "k_y2", "sigma_y"});
      cfg.baseline.smc.lambda_y = number(s, "smc", "lambda_y", cfg.baseline.smc.lambda_y);
      cfg.baseline.smc.k_y1 = number(s, "smc", "k_y1", cfg.baseline.smc.k_y1);
      cfg.baseline.smc.k_y2 = number(s, "smc", "k_y2", cfg.baseline.smc.k_y2);
      cfg.baseline.smc.sigma_y = number(s, "smc", "sigma_y", cfg.baseline.smc.sigma_y);
    }
    cfg.baseline.dob_bandwidth = number(b, "baselines", "dob_bandwidth", cfg.baseline.dob_bandwidth);
  }

  if (root.contains("memory")) {
    const json& m = root.at("memory");
    require_keys(m, "memory", {"length", "unit"});
    cfg.memory.length = number(m, "memory", "length", cfg.memory.length);
    if (m.contains("unit")) {
      const std::string unit = m.at("unit").get<std::string>();
      if (unit == "samples") {
        cfg.memory.unit = MemoryUnit::samples;
      } else if (unit == "seconds") {
        cfg.memory.unit = MemoryUnit::seconds;
      } else {
        throw ConfigError("memory.unit must be 'samples' or 'seconds'");
      }
    }
  }

  if (root.contains("sim")) {
    const json& s = root.at("sim");
    require_keys(s, "sim", {"dt", "settle_skip", "quantize_position", "quantum"});
    cfg.sim.dt = number(s, "sim", "dt", cfg.sim.dt);
    cfg.sim.settle_skip = number(s, "sim", "settle_skip", cfg.sim.settle_skip);
    cfg.sim.quantize_position = boolean(s, "sim", "quantize_position", cfg.sim.quantize_position);
    cfg.sim.quantum = number(s, "sim", "quantum", cfg.sim.quantum);
  }

  cfg.table_frequencies = number_list(root, "config", "table_frequencies", cfg.table_frequencies);
  cfg.memory_sweep_lengths =
      number_list(root, "config", "memory_sweep_lengths", cfg.memory_sweep_lengths);

  try {
    cfg.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& err) {
    throw ConfigError(std::string("invalid configuration: ") + err.what());
  }
  return cfg;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file: " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const Config& cfg) {
  json root;
  root["plant"] = {
      {"m_bar", cfg.plant.m_bar},
      {"b_bar", cfg.plant.b_bar},
      {"c_bar", cfg.plant.c_bar},
      {"g_bar", cfg.plant.g_bar},
      {"uncertainty",
       {{"dm", dump_sinusoid(cfg.plant.uncertainty.dm)},
        {"db", dump_sinusoid(cfg.plant.uncertainty.db)},
        {"dc", dump_sinusoid(cfg.plant.uncertainty.dc)},
        {"dg", dump_sinusoid(cfg.plant.uncertainty.dg)},
        {"friction",
         {{"coulomb_level", cfg.plant.uncertainty.friction.coulomb_level},
          {"viscous_extra", cfg.plant.uncertainty.friction.viscous_extra},
          {"smoothing_width", cfg.plant.uncertainty.friction.smoothing_width}}}}},
  };
  root["reference"] = {
      {"kind", cfg.reference.kind == ReferenceKind::sine ? "sine" : "triangle"},
      {"frequency", cfg.reference.frequency},
      {"amplitude", cfg.reference.amplitude},
      {"duration", cfg.reference.duration},
  };
  root["afosmc"] = {
      {"lambda", cfg.afosmc.lambda},
      {"alpha", cfg.afosmc.alpha},
      {"k_p", cfg.afosmc.k_p},
      {"k_s", cfg.afosmc.k_s},
      {"l_bar", cfg.afosmc.l_bar},
      {"k1", cfg.afosmc.k1},
      {"epsilon0", cfg.afosmc.epsilon0},
      {"beta0", cfg.afosmc.beta0},
      {"epsilon_floor", cfg.afosmc.epsilon_floor},
  };
  root["compensator"] = {
      {"lambda1", cfg.compensator.lambda1},
      {"lambda2", cfg.compensator.lambda2},
      {"lambda3", cfg.compensator.lambda3},
      {"Q", cfg.compensator.q_weight},
      {"R", cfg.compensator.r_weight},
      {"kappa", cfg.compensator.kappa},
  };
  root["baselines"] = {
      {"pid",
       {{"k_x1", cfg.baseline.pid.k_x1},
        {"k_x2", cfg.baseline.pid.k_x2},
        {"k_x3", cfg.baseline.pid.k_x3}}},
      {"smc",
       {{"lambda_y", cfg.baseline.smc.lambda_y},
        {"k_y1", cfg.baseline.smc.k_y1},
        {"k_y2", cfg.baseline.smc.k_y2},
        {"sigma_y", cfg.baseline.smc.sigma_y}}},
      {"dob_bandwidth", cfg.baseline.dob_bandwidth},
  };
  root["memory"] = {
      {"length", cfg.memory.length},
      {"unit", cfg.memory.unit == MemoryUnit::samples ? "samples" : "seconds"},
  };
  root["sim"] = {
      {"dt", cfg.sim.dt},
      {"settle_skip", cfg.sim.settle_skip},
      {"quantize_position", cfg.sim.quantize_position},
      {"quantum", cfg.sim.quantum},
  };
  root["table_frequencies"] = cfg.table_frequencies;
  root["memory_sweep_lengths"] = cfg.memory_sweep_lengths;
  return root.dump(2) + "\n";
}

}  // namespace usmsim
