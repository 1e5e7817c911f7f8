#include "polarpic/driver.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "polarpic/format.hpp"
#include "polarpic/parallel.hpp"
#include "polarpic/pusher.hpp"

namespace polarpic {

namespace {

const RunConfig& checked(const RunConfig& config) {
  config.validate();
  return config;
}

}  // namespace

Simulation::Simulation(const RunConfig& config)
    : Simulation(config, sample_diocotron(checked(config).initial_condition(), config.particles,
                                          config.domain())) {}

Simulation::Simulation(const RunConfig& config, ParticleEnsemble initial)
    : config_(checked(config)),
      grid_(config.grid()),
      partition_(config.partition()),
      solver_(grid_),
      state_(std::move(initial)) {
  partition_.check_coarser_than(grid_);
  set_thread_count(config_.threads);
  apply_boundaries(state_, config_.domain());
  rho_ = deposit_density(state_, grid_);
  e_r_.resize(grid_.size());
  e_theta_.resize(grid_.size());
  const std::size_t n = state_.size();
  e_r_particles_.resize(n);
  e_theta_particles_.resize(n);
}

void Simulation::compute_controls() {
  const double h = config_.h;
  b_pointwise_.clear();
  switch (config_.mode) {
    case ControlMode::uncontrolled:
      b_cells_.assign(static_cast<std::size_t>(partition_.size()), config_.b_const);
      b_particles_.assign(state_.size(), config_.b_const);
      return;
    case ControlMode::strategy_one: {
      const CellStatistics stats = cell_statistics(state_, partition_, e_r_particles_);
      b_cells_ = strategy_one(stats, state_, e_r_particles_, config_.weights, partition_, h);
      b_particles_ = broadcast_to_particles(b_cells_, stats.cell);
      return;
    }
    case ControlMode::strategy_two: {
      const EnsembleMeans means = ensemble_means(state_);
      b_pointwise_ = strategy_two_pointwise(state_, e_r_particles_, config_.weights, means, h);
      b_cells_ = interpolate_control(b_pointwise_, state_, partition_);
      b_particles_ = broadcast_to_particles(b_cells_, locate_control_cells(state_, partition_));
      return;
    }
  }
}

std::optional<DiagnosticsRecord> Simulation::step(bool diagnose) {
  try {
    if (config_.charge == 1.0) {
      phi_ = solver_.solve(rho_, config_.background);
    } else {
      source_.resize(rho_.size());
      for (std::size_t c = 0; c < rho_.size(); ++c) source_[c] = config_.charge * rho_[c];
      phi_ = solver_.solve(source_, config_.background);
    }
    compute_efield(phi_, grid_, e_r_, e_theta_);
    gather_field(state_, grid_, e_r_, e_theta_, e_r_particles_, e_theta_particles_);
    compute_controls();
    if (config_.mode != ControlMode::uncontrolled) partition_.set_values(b_cells_);
    push(state_, StepInputs{config_.h, e_r_particles_, e_theta_particles_, b_particles_},
         config_.domain());
    rho_ = deposit_density(state_, grid_);
  } catch (const std::exception& e) {
    throw NumericalFailure(step_, e.what());
  }
  ++step_;
  if (!diagnose) return std::nullopt;

  DiagnosticsRecord rec;
  rec.t = time();
  rec.boundary = boundary_thermal_energy(state_, grid_);
  rec.cost = config_.mode == ControlMode::strategy_two
                 ? pointwise_cost_terms(state_, config_.weights, b_pointwise_, config_.h)
                 : cell_cost_terms(state_, config_.weights, partition_, b_cells_, config_.h);
  rec.mode_amp = mode_amplitude(rho_, grid_, config_.ic_k);
  rec.b_cells = b_cells_;
  return rec;
}

RunResult run(const RunConfig& config) {
  Simulation sim(config);
  RunResult result;
  result.grid = sim.grid();
  result.control_cells = sim.partition().size();
  const int total = config.steps();

  // Step index -> requested snapshot times landing on it.
  std::vector<std::pair<int, double>> wanted;
  wanted.emplace_back(0, 0.0);
  for (double t : config.snapshot_times) {
    const int k = static_cast<int>(std::lround(t / config.h));
    if (k > 0 && k <= total) wanted.emplace_back(k, t);
  }
  std::sort(wanted.begin(), wanted.end());
  wanted.erase(std::unique(wanted.begin(), wanted.end(),
                           [](const auto& a, const auto& b) { return a.first == b.first; }),
               wanted.end());
  std::size_t next = 0;
  auto capture = [&] {
    while (next < wanted.size() && wanted[next].first == sim.step_index()) {
      Snapshot s;
      s.t = sim.time();
      s.tag = format_double(wanted[next].second);
      s.rho = sim.density();
      if (config.write_particles) s.particles = sim.state();
      result.snapshots.push_back(std::move(s));
      ++next;
    }
  };

  capture();
  result.series.reserve(static_cast<std::size_t>(total));
  for (int n = 0; n < total; ++n) {
    result.series.push_back(*sim.step(true));
    capture();
  }
  result.final_state = sim.state();
  return result;
}

std::string diagnostics_header(int control_cells) {
  std::string h = "t,E_b,rho_b,U_b_r,U_b_theta,J_pos,J_posvar,J_vel,J_velvar,J_ctrl,mode_amp";
  for (int k = 1; k <= control_cells; ++k) h += ",B_" + std::to_string(k);
  return h;
}

void write_diagnostics_csv(std::ostream& os, const std::vector<DiagnosticsRecord>& series,
                           int control_cells) {
  os << diagnostics_header(control_cells) << '\n';
  for (const auto& r : series) {
    os << format_double(r.t) << ',' << format_double(r.boundary.energy) << ','
       << format_double(r.boundary.mass_fraction) << ',' << format_double(r.boundary.mean_v_r)
       << ',' << format_double(r.boundary.mean_v_theta) << ',' << format_double(r.cost.position)
       << ',' << format_double(r.cost.position_spread) << ',' << format_double(r.cost.velocity)
       << ',' << format_double(r.cost.velocity_spread) << ',' << format_double(r.cost.control)
       << ',' << format_double(r.mode_amp);
    for (double b : r.b_cells) os << ',' << format_double(b);
    os << '\n';
  }
}

void write_run_outputs(const RunResult& result, const RunConfig& config,
                       const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [](const std::filesystem::path& p) {
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    return out;
  };
  {
    auto out = open(dir / "diagnostics.csv");
    write_diagnostics_csv(out, result.series, result.control_cells);
  }
  for (const auto& s : result.snapshots) {
    auto out = open(dir / ("density_t" + s.tag + ".csv"));
    write_grid_csv(out, result.grid, s.rho, s.t);
    if (s.particles) {
      auto pout = open(dir / ("particles_t" + s.tag + ".csv"));
      write_particles_csv(pout, *s.particles);
    }
  }
  auto out = open(dir / "config.json");
  out << to_json(config) << '\n';
}

ParticleEnsemble integrate(const RunConfig& config, const ParticleEnsemble& initial, int steps) {
  RunConfig c = config;
  c.h = config.t_f / steps;
  Simulation sim(c, initial);
  for (int n = 0; n < steps; ++n) sim.step(false);
  return sim.state();
}

ConvergenceTable convergence_study(const RunConfig& config, const std::vector<int>& step_counts,
                                   int reference_steps) {
  config.validate();
  if (reference_steps < 1) throw ConfigError("reference step count must be positive");
  for (int s : step_counts) {
    if (s < 1) throw ConfigError("step counts must be positive");
  }
  const ParticleEnsemble initial =
      sample_diocotron(config.initial_condition(), config.particles, config.domain());
  const ParticleEnsemble reference = integrate(config, initial, reference_steps);

  ConvergenceTable table;
  table.reference_steps = reference_steps;
  for (int s : step_counts) {
    const ParticleEnsemble test = integrate(config, initial, s);
    table.rows.push_back({s, config.t_f / s, state_error(reference, test)});
  }
  for (std::size_t i = 1; i < table.rows.size(); ++i) {
    table.ratios.push_back(table.rows[i - 1].error / table.rows[i].error);
  }
  // Least-squares slope over rows with a nonzero error.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (const auto& row : table.rows) {
    if (!(row.error > 0.0)) continue;
    const double x = std::log2(row.h);
    const double y = std::log2(row.error);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  if (count >= 2) table.slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  return table;
}

}  // namespace polarpic
