#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "polarpic/control.hpp"
#include "polarpic/ensemble.hpp"
#include "polarpic/geometry.hpp"

namespace polarpic {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ControlMode { uncontrolled, strategy_one, strategy_two };

std::string_view to_string(ControlMode mode);
ControlMode parse_control_mode(std::string_view name);

/// Everything a run needs. The JSON form is a flat object whose keys are the
/// field names below (N for particles, M for the control bound, r_hat and
/// v_hat_r for the targets).
struct RunConfig {
  std::size_t particles = 200000;
  double r_min = 5.0;
  double r_max = 8.0;
  int m_r = 64;
  int m_theta = 64;
  int n_r = 4;
  int n_theta = 1;
  double h = 0.5;
  double t_f = 250.0;
  std::uint64_t seed = 1;
  ControlMode mode = ControlMode::uncontrolled;
  double b_const = 10.0;
  ControlWeights weights{};
  // Initial ring.
  double ic_alpha = 0.3;
  int ic_k = 3;
  double ic_center = 6.5;
  double ic_width = 4.0;
  // Total charge carried by the ensemble; the Poisson source is
  // charge * rho - background. 1 keeps the unit-mass normalization of rho.
  double charge = 1.0;
  // Optional uniform neutralizing background subtracted from the Poisson source.
  double background = 0.0;
  std::vector<double> snapshot_times{50.0, 125.0, 250.0};
  bool write_particles = false;
  std::string output_dir = "out";
  int threads = 0;  // 0 = OpenMP default
  std::string comment;

  /// Throws ConfigError describing the first violated constraint.
  void validate() const;
  /// N_t = round(t_f / h).
  int steps() const;

  GridSpec grid() const { return {{r_min, r_max}, m_r, m_theta}; }
  AnnulusDomain domain() const { return {r_min, r_max}; }
  ControlPartition partition() const { return {domain(), n_r, n_theta, weights.bound}; }
  InitialConditionSpec initial_condition() const {
    return {ic_alpha, ic_k, ic_center, ic_width, seed};
  }
};

/// Every key accepted in a config document, in emission order.
const std::vector<std::string>& config_keys();

/// Parses a flat JSON object; fields not present keep their values in
/// `base`. Unknown keys and type mismatches throw ConfigError.
RunConfig parse_config(std::string_view json_text, const RunConfig& base = {});
RunConfig load_config(const std::filesystem::path& path, const RunConfig& base = {});

/// Sets one field from a JSON-encoded value ("10", "\"strategy_one\"",
/// "[50,125]"). Bare words that are not valid JSON are treated as strings.
void set_config_value(RunConfig& config, std::string_view key, std::string_view value);

std::string to_json(const RunConfig& config, int indent = 2);

struct Preset {
  std::string name;
  std::string description;
  RunConfig config;
};

/// diocotron-uncontrolled, diocotron-s1, diocotron-s2 and validate.
const std::vector<Preset>& presets();
const RunConfig& preset_config(std::string_view name);

}  // namespace polarpic
