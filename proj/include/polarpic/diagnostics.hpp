#pragma once

#include <span>
#include <vector>

#include "polarpic/control.hpp"
#include "polarpic/ensemble.hpp"
#include "polarpic/geometry.hpp"

namespace polarpic {

/// Velocity spread of the particles inside the one-cell-wide bands
/// [r_min, r_min + dr) and [r_max - dr, r_max] at the radial walls.
struct BoundaryEnergy {
  double energy = 0.0;         // E_b
  double mass_fraction = 0.0;  // rho_b
  double mean_v_r = 0.0;       // U_b, radial component
  double mean_v_theta = 0.0;   // U_b, angular component
};

/// E_b = sum_{m in bands} |v_m - U_b|^2 / (2 N N_b) with N_b = 2 m_theta the
/// number of fine cells in the bands, rho_b = count / (N N_b) and U_b the
/// mean velocity of the band particles (0 when the bands are empty).
BoundaryEnergy boundary_thermal_energy(const ParticleEnsemble& ensemble, const GridSpec& grid);

/// The five summands of the one-step functional, reported separately.
struct CostTerms {
  double position = 0.0;
  double position_spread = 0.0;
  double velocity = 0.0;
  double velocity_spread = 0.0;
  double control = 0.0;

  double total() const { return position + position_spread + velocity + velocity_spread + control; }
};

/// Cell-level functional summed over the nonempty control cells, using each
/// cell's own means: h alpha_r/2 |rbar_k - rhat_k|^2 + h beta_r/(2 N_k)
/// sum |r_i - rbar_k|^2 + (same for v_r) + h gamma/2 |B_k|^2 (all cells).
CostTerms cell_cost_terms(const ParticleEnsemble& ensemble, const ControlWeights& weights,
                          const ControlPartition& partition, std::span<const double> b_cells,
                          double h);

/// Particle-level functional h sum_m (alpha_r/2 |r_m - rhat|^2 + beta_r/2
/// |r_m - rbar|^2 + alpha_v/2 |v_r,m - vhat|^2 + beta_v/2 |v_r,m - vbar|^2 +
/// gamma/2 |B_m|^2).
CostTerms pointwise_cost_terms(const ParticleEnsemble& ensemble, const ControlWeights& weights,
                               std::span<const double> b_particles, double h);

/// Max-norm distance over particles and all four state components, with
/// angles compared along the shortest arc. Throws DomainError on size
/// mismatch.
double state_error(const ParticleEnsemble& reference, const ParticleEnsemble& test);

/// |sum_ij rho_ij r_i dr dtheta exp(-i k theta_j)|.
double mode_amplitude(std::span<const double> rho, const GridSpec& grid, int k);

struct DiagnosticsRecord {
  double t = 0.0;
  BoundaryEnergy boundary;
  CostTerms cost;
  double mode_amp = 0.0;
  std::vector<double> b_cells;
};

}  // namespace polarpic
