#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "polarpic/config.hpp"
#include "polarpic/control.hpp"
#include "polarpic/diagnostics.hpp"
#include "polarpic/ensemble.hpp"
#include "polarpic/field.hpp"
#include "polarpic/geometry.hpp"

namespace polarpic {

/// A module error raised while advancing step `step` (0-based: the failing
/// push went from t^step to t^{step+1}).
class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(int step, const std::string& what)
      : std::runtime_error("step " + std::to_string(step) + ": " + what), step_(step) {}
  int step() const { return step_; }

 private:
  int step_;
};

struct Snapshot {
  double t = 0.0;
  std::string tag;
  std::vector<double> rho;
  std::optional<ParticleEnsemble> particles;
};

/// Step-by-step PIC loop:
///   deposit -> solve -> E field -> gather -> control -> push -> boundaries
///   -> deposit -> diagnostics.
/// The controls reported in the record of step n are the ones applied in the
/// push from t^n to t^{n+1}; the other record fields describe t^{n+1}.
class Simulation {
 public:
  explicit Simulation(const RunConfig& config);
  Simulation(const RunConfig& config, ParticleEnsemble initial);

  const RunConfig& config() const { return config_; }
  const GridSpec& grid() const { return grid_; }
  const ControlPartition& partition() const { return partition_; }
  const ParticleEnsemble& state() const { return state_; }
  const std::vector<double>& density() const { return rho_; }
  int step_index() const { return step_; }
  double time() const { return step_ * config_.h; }

  /// Advances one step; the record is computed only when `diagnose` is set.
  std::optional<DiagnosticsRecord> step(bool diagnose = true);

  // Inputs of the most recent push, for inspection.
  const std::vector<double>& applied_b() const { return b_particles_; }
  const std::vector<double>& applied_b_cells() const { return b_cells_; }
  const std::vector<double>& pointwise_b() const { return b_pointwise_; }
  const std::vector<double>& gathered_e_r() const { return e_r_particles_; }
  const std::vector<double>& gathered_e_theta() const { return e_theta_particles_; }

 private:
  void compute_controls();

  RunConfig config_;
  GridSpec grid_;
  ControlPartition partition_;
  PoissonSolver solver_;
  ParticleEnsemble state_;
  int step_ = 0;

  std::vector<double> rho_, source_, phi_, e_r_, e_theta_;
  std::vector<double> e_r_particles_, e_theta_particles_;
  std::vector<double> b_particles_, b_cells_, b_pointwise_;
};

struct RunResult {
  GridSpec grid;
  int control_cells = 0;
  std::vector<DiagnosticsRecord> series;
  std::vector<Snapshot> snapshots;
  ParticleEnsemble final_state;
};

/// Runs N_t = round(t_f / h) steps. The initial density is always captured
/// as the snapshot tagged "0"; requested times snap to the nearest step.
RunResult run(const RunConfig& config);

/// diagnostics.csv, density_t<tag>.csv, particles_t<tag>.csv (when enabled)
/// and the resolved config.json under `dir`.
void write_run_outputs(const RunResult& result, const RunConfig& config,
                       const std::filesystem::path& dir);

std::string diagnostics_header(int control_cells);
void write_diagnostics_csv(std::ostream& os, const std::vector<DiagnosticsRecord>& series,
                           int control_cells);

struct ConvergenceRow {
  int steps = 0;
  double h = 0.0;
  double error = 0.0;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  int reference_steps = 0;
  double slope = 0.0;          // least-squares slope of log2(err) vs log2(h)
  std::vector<double> ratios;  // err(N_t) / err(2 N_t) between consecutive rows
};

/// Integrates the same initial ensemble to t_f with each step count and
/// measures the max-norm state error against the reference run.
ConvergenceTable convergence_study(const RunConfig& config, const std::vector<int>& step_counts,
                                   int reference_steps);

/// Final state after `steps` uniform steps of size t_f / steps from `initial`.
ParticleEnsemble integrate(const RunConfig& config, const ParticleEnsemble& initial, int steps);

}  // namespace polarpic
