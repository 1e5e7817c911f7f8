// polarpic: run Diocotron experiments and the time-convergence study.
//
//   polarpic presets [--show NAME]
//   polarpic run [--preset NAME] [--config PATH] [overrides] [--emit-config PATH]
//   polarpic converge [--preset validate] [--steps 64,128,256,512] [--ref-steps 4096]
//
// Exit codes: 0 success, 1 usage or configuration error, 2 numerical failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "polarpic/config.hpp"
#include "polarpic/driver.hpp"

namespace {

using polarpic::ConfigError;
using polarpic::RunConfig;

constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;

// One CLI flag bound to one config key. String-typed keys are quoted before
// they reach the JSON parser so that e.g. `--out 123` stays a path.
struct Override {
  std::string flag;
  std::string key;
  std::string help;
  bool is_string = false;
  std::optional<std::string> value;
};

struct OverrideSet {
  std::vector<Override> items;
  std::optional<std::string> grid;
  std::optional<std::string> control_cells;
  std::optional<std::string> snapshots;
  std::vector<std::string> assignments;
  bool write_particles = false;

  OverrideSet() {
    items = {
        {"--mode", "mode", "uncontrolled | strategy_one | strategy_two", true},
        {"--seed", "seed", "RNG seed of the initial ensemble"},
        {"--out", "output_dir", "output directory", true},
        {"--particles", "N", "number of particles"},
        {"--tf", "t_f", "final time"},
        {"--dt", "h", "time step"},
        {"--b-const", "B_const", "field value in uncontrolled mode"},
        {"--alpha-r", "alpha_r", "position tracking weight"},
        {"--alpha-v", "alpha_v", "velocity tracking weight"},
        {"--beta-r", "beta_r", "position spread weight"},
        {"--beta-v", "beta_v", "velocity spread weight"},
        {"--gamma", "gamma", "control penalty"},
        {"--bound", "M", "control bound M"},
        {"--r-hat", "r_hat", "radial position target"},
        {"--v-hat-r", "v_hat_r", "radial velocity target"},
        {"--r-hat-cells", "r_hat_cells", "per-cell position targets as a JSON list"},
        {"--v-hat-r-cells", "v_hat_r_cells", "per-cell velocity targets as a JSON list"},
        {"--r-min", "r_min", "inner radius"},
        {"--r-max", "r_max", "outer radius"},
        {"--ic-alpha", "ic_alpha", "initial perturbation amplitude"},
        {"--ic-k", "ic_k", "initial perturbation mode number"},
        {"--ic-center", "ic_center", "initial ring center"},
        {"--ic-width", "ic_width", "initial ring width parameter"},
        {"--charge", "charge", "total ensemble charge scaling the Poisson source"},
        {"--background", "background", "uniform neutralizing background density"},
        {"--threads", "threads", "OpenMP threads (0 = default)"},
        {"--comment", "comment", "free-form note stored in the config", true},
    };
  }

  void attach(CLI::App* app) {
    for (auto& o : items) app->add_option(o.flag, o.value, o.help + " [" + o.key + "]");
    app->add_option("--grid", grid, "field grid as MRxMT [m_r, m_theta]");
    app->add_option("--control-cells", control_cells, "control partition as NRxNT [n_r, n_theta]");
    app->add_option("--snapshots", snapshots, "comma-separated snapshot times [snapshot_times]");
    app->add_flag("--write-particles", write_particles,
                  "also write particle snapshots [write_particles]");
    app->add_option("--set", assignments, "KEY=VALUE, any config key (repeatable)");
  }

  static std::pair<std::string, std::string> split_dims(const std::string& s,
                                                        const std::string& what) {
    const auto x = s.find_first_of("xX");
    if (x == std::string::npos || x == 0 || x + 1 == s.size()) {
      throw ConfigError(what + " must look like 64x64, got '" + s + "'");
    }
    return {s.substr(0, x), s.substr(x + 1)};
  }

  void apply(RunConfig& config) const {
    for (const auto& o : items) {
      if (!o.value) continue;
      const std::string v = o.is_string ? nlohmann_quote(*o.value) : *o.value;
      polarpic::set_config_value(config, o.key, v);
    }
    if (grid) {
      const auto [a, b] = split_dims(*grid, "--grid");
      polarpic::set_config_value(config, "m_r", a);
      polarpic::set_config_value(config, "m_theta", b);
    }
    if (control_cells) {
      const auto [a, b] = split_dims(*control_cells, "--control-cells");
      polarpic::set_config_value(config, "n_r", a);
      polarpic::set_config_value(config, "n_theta", b);
    }
    if (snapshots) polarpic::set_config_value(config, "snapshot_times", "[" + *snapshots + "]");
    if (write_particles) config.write_particles = true;
    for (const auto& a : assignments) {
      const auto eq = a.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects KEY=VALUE, got '" + a + "'");
      polarpic::set_config_value(config, a.substr(0, eq), a.substr(eq + 1));
    }
  }

  static std::string nlohmann_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
      if (c == '"' || c == '\\') out += '\\';
      out += c;
    }
    return out + "\"";
  }
};

RunConfig resolve(const std::string& preset, const std::string& config_path,
                  const OverrideSet& overrides) {
  RunConfig config = polarpic::preset_config(preset);
  if (!config_path.empty()) config = polarpic::load_config(config_path, config);
  overrides.apply(config);
  config.validate();
  return config;
}

void emit_config(const RunConfig& config, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << polarpic::to_json(config) << '\n';
}

std::vector<int> parse_steps(const std::string& list) {
  std::vector<int> steps;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size() || v < 1) throw std::invalid_argument(item);
      steps.push_back(v);
    } catch (const std::exception&) {
      throw ConfigError("--steps expects positive integers, got '" + item + "'");
    }
  }
  if (steps.empty()) throw ConfigError("--steps must not be empty");
  return steps;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polar particle-in-cell Vlasov-Poisson solver with feedback-controlled "
               "magnetic confinement"};
  app.require_subcommand(1);

  auto* presets_cmd = app.add_subcommand("presets", "list built-in experiment configurations");
  std::string show;
  presets_cmd->add_option("--show", show, "print the resolved JSON of one preset");

  auto* run_cmd = app.add_subcommand("run", "run a simulation and write its outputs");
  std::string run_preset = "diocotron-uncontrolled";
  std::string run_config_path;
  std::string run_emit;
  OverrideSet run_overrides;
  run_cmd->add_option("--preset", run_preset, "base preset")->capture_default_str();
  run_cmd->add_option("--config", run_config_path, "JSON config file (overrides the preset)");
  run_cmd->add_option("--emit-config", run_emit, "write the fully resolved config to PATH");
  run_overrides.attach(run_cmd);

  auto* conv_cmd = app.add_subcommand("converge", "first-order time convergence study");
  std::string conv_preset = "validate";
  std::string conv_config_path;
  std::string conv_emit;
  std::string steps_list = "64,128,256,512";
  int ref_steps = 4096;
  OverrideSet conv_overrides;
  conv_cmd->add_option("--preset", conv_preset, "base preset")->capture_default_str();
  conv_cmd->add_option("--config", conv_config_path, "JSON config file (overrides the preset)");
  conv_cmd->add_option("--emit-config", conv_emit, "write the fully resolved config to PATH");
  conv_cmd->add_option("--steps", steps_list, "coarse step counts")->capture_default_str();
  conv_cmd->add_option("--ref-steps", ref_steps, "reference step count")->capture_default_str();
  conv_overrides.attach(conv_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitConfig;
  }

  try {
    if (*presets_cmd) {
      if (!show.empty()) {
        std::cout << polarpic::to_json(polarpic::preset_config(show)) << '\n';
        return 0;
      }
      for (const auto& p : polarpic::presets()) {
        std::printf("%-24s %s\n", p.name.c_str(), p.description.c_str());
      }
      return 0;
    }

    if (*run_cmd) {
      const RunConfig config = resolve(run_preset, run_config_path, run_overrides);
      if (!run_emit.empty()) emit_config(config, run_emit);
      const auto result = polarpic::run(config);
      polarpic::write_run_outputs(result, config, config.output_dir);
      std::printf("%d steps, %zu snapshots written to %s\n", config.steps(),
                  result.snapshots.size(), config.output_dir.c_str());
      if (!result.series.empty()) {
        const auto& last = result.series.back();
        std::printf("t=%g  E_b=%.6g  rho_b=%.6g  mode_amp=%.6g\n", last.t, last.boundary.energy,
                    last.boundary.mass_fraction, last.mode_amp);
      }
      return 0;
    }

    if (*conv_cmd) {
      const RunConfig config = resolve(conv_preset, conv_config_path, conv_overrides);
      if (!conv_emit.empty()) emit_config(config, conv_emit);
      const auto table =
          polarpic::convergence_study(config, parse_steps(steps_list), ref_steps);
      std::printf("# reference N_t = %d, t_f = %g, N = %zu\n", table.reference_steps,
                  config.t_f, config.particles);
      std::printf("%8s %14s %14s %8s\n", "N_t", "h", "err", "ratio");
      for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        if (i == 0) {
          std::printf("%8d %14.6e %14.6e %8s\n", row.steps, row.h, row.error, "-");
        } else {
          std::printf("%8d %14.6e %14.6e %8.3f\n", row.steps, row.h, row.error,
                      table.ratios[i - 1]);
        }
      }
      std::printf("slope %.4f\n", table.slope);
      return 0;
    }
  } catch (const polarpic::NumericalFailure& e) {
    std::cerr << "numerical failure at " << e.what() << '\n';
    return kExitNumerical;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const polarpic::DomainError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return 0;
}
