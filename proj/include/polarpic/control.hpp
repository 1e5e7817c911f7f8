#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "polarpic/ensemble.hpp"
#include "polarpic/geometry.hpp"

namespace polarpic {

/// Weights and targets of the one-step tracking functional. The weights are
/// used in their already-rescaled form (alpha_r -> alpha_r / h,
/// beta_r -> beta_r / h, gamma -> gamma h absorbed).
struct ControlWeights {
  double alpha_r = 0.0;
  double alpha_v = 0.0;
  double beta_r = 0.0;
  double beta_v = 0.0;
  double gamma = 1.0;
  double bound = 100.0;  // M
  double r_target = 6.5;
  double v_r_target = 0.0;
  // Optional per-cell targets for the cell-level law; empty means every cell
  // uses the global target.
  std::vector<double> r_target_cells;
  std::vector<double> v_r_target_cells;

  void validate() const;
  double r_target_of(int k) const;
  double v_r_target_of(int k) const;
};

/// P_[-M, M](x) = min(max(x, -M), M).
double project(double x, double bound);

/// Per control cell particle counts and arithmetic means of r, v_r, v_theta
/// and the gathered radial field. Means are zero (and meaningless) for empty
/// cells.
struct CellStatistics {
  std::vector<std::size_t> count;
  std::vector<double> mean_r;
  std::vector<double> mean_v_r;
  std::vector<double> mean_v_theta;
  std::vector<double> mean_e_r;
  std::vector<int> cell;  // control cell of each particle

  std::size_t cells() const { return count.size(); }
  bool empty(int k) const { return count[static_cast<std::size_t>(k)] == 0; }
};

std::vector<int> locate_control_cells(const ParticleEnsemble& ensemble,
                                      const ControlPartition& partition);

CellStatistics cell_statistics(const ParticleEnsemble& ensemble,
                               const ControlPartition& partition, std::span<const double> e_r);

/// Numerator and denominator pieces of the cell-level feedback law.
struct FeedbackTerms {
  std::vector<double> r_v;  // velocity tracking numerator
  std::vector<double> r_r;  // position tracking numerator
  std::vector<double> s_v;
  std::vector<double> s_r;
};

FeedbackTerms strategy_one_terms(const CellStatistics& stats, const ParticleEnsemble& ensemble,
                                 std::span<const double> e_r, const ControlWeights& weights,
                                 double h);

/// Cell-level instantaneous feedback:
///   B_k = P((R_v,k + R_r,k) / (gamma + S_v,k + S_r,k)), empty cells -> 0.
std::vector<double> strategy_one(const CellStatistics& stats, const ParticleEnsemble& ensemble,
                                 std::span<const double> e_r, const ControlWeights& weights,
                                 const ControlPartition& partition, double h);

struct EnsembleMeans {
  double r = 0.0;
  double v_r = 0.0;
};

EnsembleMeans ensemble_means(const ParticleEnsemble& ensemble);

/// Particle-level instantaneous feedback against the global means.
std::vector<double> strategy_two_pointwise(const ParticleEnsemble& ensemble,
                                           std::span<const double> e_r,
                                           const ControlWeights& weights,
                                           const EnsembleMeans& means, double h);

/// Piecewise-constant interpolation: per-cell arithmetic mean of the
/// pointwise controls of member particles, empty cells -> 0, projected onto
/// [-M, M].
std::vector<double> interpolate_control(std::span<const double> b_particles,
                                        const ParticleEnsemble& ensemble,
                                        const ControlPartition& partition);

/// h -> 0 limits of the two laws, B = P((R_v + R_r) / gamma).
std::vector<double> strategy_one_continuous(const CellStatistics& stats,
                                            const ParticleEnsemble& ensemble,
                                            const ControlWeights& weights,
                                            const ControlPartition& partition);
std::vector<double> strategy_two_continuous(const ParticleEnsemble& ensemble,
                                            const ControlWeights& weights,
                                            const EnsembleMeans& means);

/// Spreads per-cell values onto particles through their control cell.
std::vector<double> broadcast_to_particles(std::span<const double> cell_values,
                                           std::span<const int> cell_of_particle);

}  // namespace polarpic
