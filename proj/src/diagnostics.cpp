#include "polarpic/diagnostics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>

#include "polarpic/parallel.hpp"

namespace polarpic {

BoundaryEnergy boundary_thermal_energy(const ParticleEnsemble& ensemble, const GridSpec& grid) {
  BoundaryEnergy out;
  if (ensemble.empty()) return out;
  const int last = grid.m_r - 1;
  auto in_band = [&](std::size_t m) {
    const int i = locate_fine_cell(ensemble.r[m], ensemble.theta[m], grid).i;
    return (i == 0 || i == last) ? std::size_t{0} : std::size_t{1};
  };
  const auto first = binned_sum<3>(ensemble.size(), 1, in_band, [&](std::size_t m) {
    return std::array<double, 3>{1.0, ensemble.v_r[m], ensemble.v_theta[m]};
  });
  const double count = first[0][0];
  const double n = static_cast<double>(ensemble.size());
  const double n_b = 2.0 * grid.m_theta;
  out.mass_fraction = count / (n * n_b);
  if (count == 0.0) return out;
  out.mean_v_r = first[0][1] / count;
  out.mean_v_theta = first[0][2] / count;
  const auto second = binned_sum<1>(ensemble.size(), 1, in_band, [&](std::size_t m) {
    const double du = ensemble.v_r[m] - out.mean_v_r;
    const double dv = ensemble.v_theta[m] - out.mean_v_theta;
    return std::array<double, 1>{du * du + dv * dv};
  });
  out.energy = second[0][0] / (2.0 * n * n_b);
  return out;
}

CostTerms cell_cost_terms(const ParticleEnsemble& ensemble, const ControlWeights& weights,
                          const ControlPartition& partition, std::span<const double> b_cells,
                          double h) {
  const auto cells = static_cast<std::size_t>(partition.size());
  if (b_cells.size() != cells) throw DomainError("control value count does not match partition");
  const auto cell = locate_control_cells(ensemble, partition);
  auto bin = [&](std::size_t m) { return static_cast<std::size_t>(cell[m]); };
  const auto sums = binned_sum<3>(ensemble.size(), cells, bin, [&](std::size_t m) {
    return std::array<double, 3>{1.0, ensemble.r[m], ensemble.v_r[m]};
  });
  std::vector<double> mean_r(cells, 0.0), mean_v(cells, 0.0);
  for (std::size_t k = 0; k < cells; ++k) {
    if (sums[k][0] > 0.0) {
      mean_r[k] = sums[k][1] / sums[k][0];
      mean_v[k] = sums[k][2] / sums[k][0];
    }
  }
  const auto spread = binned_sum<2>(ensemble.size(), cells, bin, [&](std::size_t m) {
    const double dr = ensemble.r[m] - mean_r[cell[m]];
    const double dv = ensemble.v_r[m] - mean_v[cell[m]];
    return std::array<double, 2>{dr * dr, dv * dv};
  });

  CostTerms j;
  for (std::size_t k = 0; k < cells; ++k) {
    const double n_k = sums[k][0];
    if (n_k > 0.0) {
      const int kk = static_cast<int>(k);
      const double dr = mean_r[k] - weights.r_target_of(kk);
      const double dv = mean_v[k] - weights.v_r_target_of(kk);
      j.position += 0.5 * h * weights.alpha_r * dr * dr;
      j.velocity += 0.5 * h * weights.alpha_v * dv * dv;
      j.position_spread += 0.5 * h * weights.beta_r / n_k * spread[k][0];
      j.velocity_spread += 0.5 * h * weights.beta_v / n_k * spread[k][1];
    }
    j.control += 0.5 * h * weights.gamma * b_cells[k] * b_cells[k];
  }
  return j;
}

CostTerms pointwise_cost_terms(const ParticleEnsemble& ensemble, const ControlWeights& weights,
                               std::span<const double> b_particles, double h) {
  if (b_particles.size() != ensemble.size()) throw DomainError("control size mismatch");
  const EnsembleMeans means = ensemble_means(ensemble);
  const auto sums = binned_sum<5>(
      ensemble.size(), 1, [](std::size_t) { return std::size_t{0}; },
      [&](std::size_t m) {
        const double r = ensemble.r[m];
        const double vr = ensemble.v_r[m];
        const double pr = r - weights.r_target;
        const double sr = r - means.r;
        const double pv = vr - weights.v_r_target;
        const double sv = vr - means.v_r;
        return std::array<double, 5>{pr * pr, sr * sr, pv * pv, sv * sv,
                                     b_particles[m] * b_particles[m]};
      });
  CostTerms j;
  j.position = 0.5 * h * weights.alpha_r * sums[0][0];
  j.position_spread = 0.5 * h * weights.beta_r * sums[0][1];
  j.velocity = 0.5 * h * weights.alpha_v * sums[0][2];
  j.velocity_spread = 0.5 * h * weights.beta_v * sums[0][3];
  j.control = 0.5 * h * weights.gamma * sums[0][4];
  return j;
}

double state_error(const ParticleEnsemble& reference, const ParticleEnsemble& test) {
  if (reference.size() != test.size()) {
    throw DomainError("state_error: ensembles have different particle counts (" +
                      std::to_string(reference.size()) + " vs " + std::to_string(test.size()) +
                      ")");
  }
  double worst = 0.0;
  for (std::size_t m = 0; m < reference.size(); ++m) {
    worst = std::max({worst, std::abs(reference.r[m] - test.r[m]),
                      std::abs(angular_difference(reference.theta[m], test.theta[m])),
                      std::abs(reference.v_r[m] - test.v_r[m]),
                      std::abs(reference.v_theta[m] - test.v_theta[m])});
  }
  return worst;
}

double mode_amplitude(std::span<const double> rho, const GridSpec& grid, int k) {
  if (k < 0) throw DomainError("mode number must be nonnegative");
  std::complex<double> acc = 0.0;
  for (int j = 0; j < grid.m_theta; ++j) {
    double column = 0.0;
    for (int i = 0; i < grid.m_r; ++i) column += rho[grid.flat(i, j)] * grid.cell_area(i);
    acc += column * std::polar(1.0, -k * grid.theta_center(j));
  }
  return std::abs(acc);
}

}  // namespace polarpic
