#include "polarpic/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <json.hpp>

namespace polarpic {

using json = nlohmann::json;

std::string_view to_string(ControlMode mode) {
  switch (mode) {
    case ControlMode::uncontrolled: return "uncontrolled";
    case ControlMode::strategy_one: return "strategy_one";
    case ControlMode::strategy_two: return "strategy_two";
  }
  return "uncontrolled";
}

ControlMode parse_control_mode(std::string_view name) {
  if (name == "uncontrolled") return ControlMode::uncontrolled;
  if (name == "strategy_one" || name == "s1") return ControlMode::strategy_one;
  if (name == "strategy_two" || name == "s2") return ControlMode::strategy_two;
  throw ConfigError("unknown mode '" + std::string(name) +
                    "' (expected uncontrolled, strategy_one or strategy_two)");
}

void RunConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (particles < 1) fail("N must be at least 1");
  if (!(r_min > 0.0) || !(r_max > r_min)) fail("need 0 < r_min < r_max");
  if (m_r < 2 || m_theta < 2) fail("grid needs m_r >= 2 and m_theta >= 2");
  if (n_r < 1 || n_theta < 1) fail("control partition needs n_r >= 1 and n_theta >= 1");
  if (n_r > m_r || n_theta > m_theta) fail("control partition must not be finer than the grid");
  if (!(h > 0.0) || !std::isfinite(h)) fail("h must be positive");
  if (!(t_f >= 0.0) || !std::isfinite(t_f)) fail("t_f must be nonnegative");
  if (!std::isfinite(b_const)) fail("B_const must be finite");
  if (!(ic_alpha >= 0.0 && ic_alpha < 1.0)) fail("ic_alpha must lie in [0, 1)");
  if (ic_k < 1) fail("ic_k must be a positive integer");
  if (!(ic_width > 0.0)) fail("ic_width must be positive");
  if (!(charge > 0.0) || !std::isfinite(charge)) fail("charge must be positive");
  if (!std::isfinite(background)) fail("background must be finite");
  if (threads < 0) fail("threads must be nonnegative");
  for (double t : snapshot_times) {
    if (!(t >= 0.0)) fail("snapshot times must be nonnegative");
  }
  const auto cells = static_cast<std::size_t>(n_r) * n_theta;
  if (!weights.r_target_cells.empty() && weights.r_target_cells.size() != cells) {
    fail("r_hat_cells must have n_r * n_theta entries");
  }
  if (!weights.v_r_target_cells.empty() && weights.v_r_target_cells.size() != cells) {
    fail("v_hat_r_cells must have n_r * n_theta entries");
  }
  try {
    weights.validate();
  } catch (const DomainError& e) {
    fail(e.what());
  }
}

int RunConfig::steps() const { return static_cast<int>(std::lround(t_f / h)); }

namespace {

struct Field {
  std::function<void(RunConfig&, const json&)> read;
  std::function<json(const RunConfig&)> write;
};

template <class T>
T get_as(const json& v, const std::string& key) {
  try {
    if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) throw ConfigError("");
      return v.get<double>();
    } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
      if constexpr (std::is_unsigned_v<T>) {
        if (v.is_number_integer() && !v.is_number_unsigned()) throw ConfigError("");
      }
      if (v.is_number_integer()) return v.get<T>();
      if (v.is_number_float()) {
        // Accept 1e5-style literals when they are exact integers.
        const double d = v.get<double>();
        if (d == std::floor(d)) return static_cast<T>(d);
      }
      throw ConfigError("");
    } else {
      return v.get<T>();
    }
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type: " + v.dump());
  }
}

#define POLARPIC_FIELD(key, member, type)                                         \
  {                                                                               \
    key, Field {                                                                  \
      [](RunConfig& c, const json& v) { c.member = get_as<type>(v, key); },       \
          [](const RunConfig& c) { return json(c.member); }                       \
    }                                                                             \
  }

const std::vector<std::pair<std::string, Field>>& field_table() {
  static const std::vector<std::pair<std::string, Field>> table = {
      POLARPIC_FIELD("N", particles, std::size_t),
      POLARPIC_FIELD("r_min", r_min, double),
      POLARPIC_FIELD("r_max", r_max, double),
      POLARPIC_FIELD("m_r", m_r, int),
      POLARPIC_FIELD("m_theta", m_theta, int),
      POLARPIC_FIELD("n_r", n_r, int),
      POLARPIC_FIELD("n_theta", n_theta, int),
      POLARPIC_FIELD("h", h, double),
      POLARPIC_FIELD("t_f", t_f, double),
      POLARPIC_FIELD("seed", seed, std::uint64_t),
      {"mode",
       Field{[](RunConfig& c, const json& v) {
               c.mode = parse_control_mode(get_as<std::string>(v, "mode"));
             },
             [](const RunConfig& c) { return json(std::string(to_string(c.mode))); }}},
      POLARPIC_FIELD("B_const", b_const, double),
      POLARPIC_FIELD("alpha_r", weights.alpha_r, double),
      POLARPIC_FIELD("alpha_v", weights.alpha_v, double),
      POLARPIC_FIELD("beta_r", weights.beta_r, double),
      POLARPIC_FIELD("beta_v", weights.beta_v, double),
      POLARPIC_FIELD("gamma", weights.gamma, double),
      POLARPIC_FIELD("M", weights.bound, double),
      POLARPIC_FIELD("r_hat", weights.r_target, double),
      POLARPIC_FIELD("v_hat_r", weights.v_r_target, double),
      POLARPIC_FIELD("r_hat_cells", weights.r_target_cells, std::vector<double>),
      POLARPIC_FIELD("v_hat_r_cells", weights.v_r_target_cells, std::vector<double>),
      POLARPIC_FIELD("ic_alpha", ic_alpha, double),
      POLARPIC_FIELD("ic_k", ic_k, int),
      POLARPIC_FIELD("ic_center", ic_center, double),
      POLARPIC_FIELD("ic_width", ic_width, double),
      POLARPIC_FIELD("charge", charge, double),
      POLARPIC_FIELD("background", background, double),
      POLARPIC_FIELD("snapshot_times", snapshot_times, std::vector<double>),
      POLARPIC_FIELD("write_particles", write_particles, bool),
      POLARPIC_FIELD("output_dir", output_dir, std::string),
      POLARPIC_FIELD("threads", threads, int),
      POLARPIC_FIELD("comment", comment, std::string),
  };
  return table;
}

#undef POLARPIC_FIELD

const Field& find_field(std::string_view key) {
  for (const auto& [name, field] : field_table()) {
    if (name == key) return field;
  }
  throw ConfigError("unknown config key '" + std::string(key) + "'");
}

void apply_object(RunConfig& config, const json& doc) {
  if (!doc.is_object()) throw ConfigError("config document must be a JSON object");
  for (const auto& [key, value] : doc.items()) find_field(key).read(config, value);
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& entry : field_table()) k.push_back(entry.first);
    return k;
  }();
  return keys;
}

RunConfig parse_config(std::string_view json_text, const RunConfig& base) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed config JSON: ") + e.what());
  }
  RunConfig config = base;
  apply_object(config, doc);
  return config;
}

RunConfig load_config(const std::filesystem::path& path, const RunConfig& base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), base);
}

void set_config_value(RunConfig& config, std::string_view key, std::string_view value) {
  const Field& field = find_field(key);
  json v;
  try {
    v = json::parse(value);
  } catch (const json::parse_error&) {
    v = std::string(value);
  }
  field.read(config, v);
}

std::string to_json(const RunConfig& config, int indent) {
  // ordered_json keeps the documented key order in emitted files.
  nlohmann::ordered_json doc;
  for (const auto& [name, field] : field_table()) doc[name] = field.write(config);
  return doc.dump(indent);
}

const std::vector<Preset>& presets() {
  static const std::vector<Preset> table = [] {
    RunConfig uncontrolled;
    uncontrolled.mode = ControlMode::uncontrolled;
    uncontrolled.b_const = 10.0;
    uncontrolled.comment =
        "Diocotron instability, constant field B = 10, N reduced from 1e7 to 2e5";

    // Published control weights; only N is reduced.
    RunConfig s1 = uncontrolled;
    s1.mode = ControlMode::strategy_one;
    s1.weights.alpha_r = 100.0;
    s1.weights.alpha_v = 5.0;
    s1.weights.beta_r = 10.0;
    s1.weights.beta_v = 5.0;
    s1.weights.gamma = 1e-4;
    s1.weights.bound = 100.0;
    s1.n_r = 4;
    s1.n_theta = 1;
    s1.comment =
        "Diocotron instability, cell-level feedback on 4 radial control cells, "
        "alpha_r=100 alpha_v=5 beta_r=10 beta_v=5 gamma=1e-4 M=100, N reduced to 2e5";

    RunConfig s2 = s1;
    s2.mode = ControlMode::strategy_two;
    s2.comment =
        "Diocotron instability, particle-level feedback averaged over 4 radial control "
        "cells, same weights as diocotron-s1, N reduced to 2e5";

    RunConfig validate = uncontrolled;
    validate.particles = 10000;
    validate.t_f = 10.0;
    validate.h = 10.0 / 4096.0;
    validate.snapshot_times = {};
    validate.comment =
        "Time-order validation: reference with 2^12 steps, coarse runs with 2^6..2^9 steps";

    return std::vector<Preset>{
        {"diocotron-uncontrolled", "Diocotron ring under a constant field B = 10", uncontrolled},
        {"diocotron-s1", "Diocotron ring with cell-level feedback control", s1},
        {"diocotron-s2", "Diocotron ring with particle-level feedback averaged to cells", s2},
        {"validate", "First-order time convergence study (N = 1e4, t_f = 10)", validate},
    };
  }();
  return table;
}

const RunConfig& preset_config(std::string_view name) {
  for (const auto& p : presets()) {
    if (p.name == name) return p.config;
  }
  throw ConfigError("unknown preset '" + std::string(name) + "'");
}

}  // namespace polarpic
