#include "polarpic/control.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "polarpic/parallel.hpp"

namespace polarpic {

void ControlWeights::validate() const {
  if (!(gamma > 0.0)) throw DomainError("control penalty gamma must be positive");
  if (!(bound > 0.0)) throw DomainError("control bound M must be positive");
  if (alpha_r < 0.0 || alpha_v < 0.0 || beta_r < 0.0 || beta_v < 0.0) {
    throw DomainError("tracking weights must be nonnegative");
  }
}

double ControlWeights::r_target_of(int k) const {
  return r_target_cells.empty() ? r_target : r_target_cells.at(static_cast<std::size_t>(k));
}

double ControlWeights::v_r_target_of(int k) const {
  return v_r_target_cells.empty() ? v_r_target
                                  : v_r_target_cells.at(static_cast<std::size_t>(k));
}

double project(double x, double bound) { return std::min(std::max(x, -bound), bound); }

std::vector<int> locate_control_cells(const ParticleEnsemble& ensemble,
                                      const ControlPartition& partition) {
  std::vector<int> cell(ensemble.size());
  parallel_for(ensemble.size(), [&](std::size_t m) {
    cell[m] = partition.locate(ensemble.r[m], ensemble.theta[m]);
  });
  return cell;
}

CellStatistics cell_statistics(const ParticleEnsemble& ensemble,
                               const ControlPartition& partition, std::span<const double> e_r) {
  if (e_r.size() != ensemble.size()) throw DomainError("gathered field size mismatch");
  const auto cells = static_cast<std::size_t>(partition.size());
  CellStatistics s;
  s.cell = locate_control_cells(ensemble, partition);
  const auto sums = binned_sum<5>(
      ensemble.size(), cells, [&](std::size_t m) { return static_cast<std::size_t>(s.cell[m]); },
      [&](std::size_t m) {
        return std::array<double, 5>{1.0, ensemble.r[m], ensemble.v_r[m], ensemble.v_theta[m],
                                     e_r[m]};
      });
  s.count.resize(cells);
  s.mean_r.assign(cells, 0.0);
  s.mean_v_r.assign(cells, 0.0);
  s.mean_v_theta.assign(cells, 0.0);
  s.mean_e_r.assign(cells, 0.0);
  for (std::size_t k = 0; k < cells; ++k) {
    s.count[k] = static_cast<std::size_t>(sums[k][0]);
    if (s.count[k] == 0) continue;
    const double inv = 1.0 / sums[k][0];
    s.mean_r[k] = sums[k][1] * inv;
    s.mean_v_r[k] = sums[k][2] * inv;
    s.mean_v_theta[k] = sums[k][3] * inv;
    s.mean_e_r[k] = sums[k][4] * inv;
  }
  return s;
}

FeedbackTerms strategy_one_terms(const CellStatistics& stats, const ParticleEnsemble& ensemble,
                                 std::span<const double> e_r, const ControlWeights& weights,
                                 double h) {
  const std::size_t cells = stats.cells();
  const double h2 = h * h;
  // Per-particle spread sums of the beta terms, centered on the time-n cell means.
  const auto spread = binned_sum<2>(
      ensemble.size(), cells, [&](std::size_t m) { return static_cast<std::size_t>(stats.cell[m]); },
      [&](std::size_t m) {
        const auto k = static_cast<std::size_t>(stats.cell[m]);
        const double r = ensemble.r[m];
        const double vr = ensemble.v_r[m];
        const double vt = ensemble.v_theta[m];
        const double centrifugal = vt * vt / r;
        const double vel = vt * (vr + h * centrifugal + h * e_r[m] - stats.mean_v_r[k]);
        const double pos =
            vt * (r + h * vr + h2 * centrifugal + h2 * e_r[m] - stats.mean_r[k]);
        return std::array<double, 2>{vel, pos};
      });

  FeedbackTerms t;
  t.r_v.assign(cells, 0.0);
  t.r_r.assign(cells, 0.0);
  t.s_v.assign(cells, 0.0);
  t.s_r.assign(cells, 0.0);
  for (std::size_t k = 0; k < cells; ++k) {
    if (stats.count[k] == 0) continue;
    const int kk = static_cast<int>(k);
    const double n_k = static_cast<double>(stats.count[k]);
    const double r = stats.mean_r[k];
    const double vr = stats.mean_v_r[k];
    const double vt = stats.mean_v_theta[k];
    const double er = stats.mean_e_r[k];
    const double centrifugal = vt * vt / r;
    t.r_v[k] = weights.alpha_v * vt * (vr + h * centrifugal + h * er - weights.v_r_target_of(kk)) +
               weights.beta_v / n_k * spread[k][0];
    t.r_r[k] = weights.alpha_r * vt *
                   (r + h * vr + h2 * centrifugal + h2 * er - weights.r_target_of(kk)) +
               weights.beta_r / n_k * spread[k][1];
    t.s_v[k] = h * (weights.alpha_v + weights.beta_v) * vt * vt;
    t.s_r[k] = h2 * (weights.alpha_r + weights.beta_r) * vt * vt;
  }
  return t;
}

std::vector<double> strategy_one(const CellStatistics& stats, const ParticleEnsemble& ensemble,
                                 std::span<const double> e_r, const ControlWeights& weights,
                                 const ControlPartition& partition, double h) {
  weights.validate();
  if (!(h > 0.0)) throw DomainError("time step must be positive");
  if (stats.cells() != static_cast<std::size_t>(partition.size())) {
    throw DomainError("cell statistics do not match the control partition");
  }
  const FeedbackTerms t = strategy_one_terms(stats, ensemble, e_r, weights, h);
  std::vector<double> b(stats.cells(), 0.0);
  for (std::size_t k = 0; k < b.size(); ++k) {
    if (stats.count[k] == 0) continue;
    b[k] = project((t.r_v[k] + t.r_r[k]) / (weights.gamma + t.s_v[k] + t.s_r[k]), weights.bound);
  }
  return b;
}

EnsembleMeans ensemble_means(const ParticleEnsemble& ensemble) {
  if (ensemble.empty()) return {};
  const auto sums = binned_sum<2>(
      ensemble.size(), 1, [](std::size_t) { return std::size_t{0}; },
      [&](std::size_t m) { return std::array<double, 2>{ensemble.r[m], ensemble.v_r[m]}; });
  const double inv = 1.0 / static_cast<double>(ensemble.size());
  return {sums[0][0] * inv, sums[0][1] * inv};
}

std::vector<double> strategy_two_pointwise(const ParticleEnsemble& ensemble,
                                           std::span<const double> e_r,
                                           const ControlWeights& weights,
                                           const EnsembleMeans& means, double h) {
  weights.validate();
  if (!(h > 0.0)) throw DomainError("time step must be positive");
  if (e_r.size() != ensemble.size()) throw DomainError("gathered field size mismatch");
  const double h2 = h * h;
  std::vector<double> b(ensemble.size());
  parallel_for(ensemble.size(), [&](std::size_t m) {
    const double r = ensemble.r[m];
    const double vr = ensemble.v_r[m];
    const double vt = ensemble.v_theta[m];
    const double centrifugal = vt * vt / r;
    const double vel_pred = vr + h * centrifugal + h * e_r[m];
    const double pos_pred = r + h * vr + h2 * centrifugal + h2 * e_r[m];
    const double r_v = weights.alpha_v * vt * (vel_pred - weights.v_r_target) +
                       weights.beta_v * vt * (vel_pred - means.v_r);
    const double r_r = weights.alpha_r * vt * (pos_pred - weights.r_target) +
                       weights.beta_r * vt * (pos_pred - means.r);
    const double s_v = h * (weights.alpha_v + weights.beta_v) * vt * vt;
    const double s_r = h2 * (weights.alpha_r + weights.beta_r) * vt * vt;
    b[m] = project((r_r + r_v) / (weights.gamma + s_r + s_v), weights.bound);
  });
  return b;
}

std::vector<double> interpolate_control(std::span<const double> b_particles,
                                        const ParticleEnsemble& ensemble,
                                        const ControlPartition& partition) {
  if (b_particles.size() != ensemble.size()) throw DomainError("control size mismatch");
  const auto cells = static_cast<std::size_t>(partition.size());
  const auto cell = locate_control_cells(ensemble, partition);
  const auto sums = binned_sum<2>(
      ensemble.size(), cells, [&](std::size_t m) { return static_cast<std::size_t>(cell[m]); },
      [&](std::size_t m) { return std::array<double, 2>{1.0, b_particles[m]}; });
  std::vector<double> out(cells, 0.0);
  for (std::size_t k = 0; k < cells; ++k) {
    if (sums[k][0] > 0.0) out[k] = project(sums[k][1] / sums[k][0], partition.bound());
  }
  return out;
}

std::vector<double> strategy_one_continuous(const CellStatistics& stats,
                                            const ParticleEnsemble& ensemble,
                                            const ControlWeights& weights,
                                            const ControlPartition& partition) {
  weights.validate();
  const std::size_t cells = stats.cells();
  if (cells != static_cast<std::size_t>(partition.size())) {
    throw DomainError("cell statistics do not match the control partition");
  }
  const auto spread = binned_sum<2>(
      ensemble.size(), cells, [&](std::size_t m) { return static_cast<std::size_t>(stats.cell[m]); },
      [&](std::size_t m) {
        const auto k = static_cast<std::size_t>(stats.cell[m]);
        const double vt = ensemble.v_theta[m];
        return std::array<double, 2>{vt * (ensemble.v_r[m] - stats.mean_v_r[k]),
                                     vt * (ensemble.r[m] - stats.mean_r[k])};
      });
  std::vector<double> b(cells, 0.0);
  for (std::size_t k = 0; k < cells; ++k) {
    if (stats.count[k] == 0) continue;
    const int kk = static_cast<int>(k);
    const double n_k = static_cast<double>(stats.count[k]);
    const double vt = stats.mean_v_theta[k];
    const double r_v = weights.alpha_v * vt * (stats.mean_v_r[k] - weights.v_r_target_of(kk)) +
                       weights.beta_v / n_k * spread[k][0];
    const double r_r = weights.alpha_r * vt * (stats.mean_r[k] - weights.r_target_of(kk)) +
                       weights.beta_r / n_k * spread[k][1];
    b[k] = project((r_v + r_r) / weights.gamma, weights.bound);
  }
  return b;
}

std::vector<double> strategy_two_continuous(const ParticleEnsemble& ensemble,
                                            const ControlWeights& weights,
                                            const EnsembleMeans& means) {
  weights.validate();
  std::vector<double> b(ensemble.size());
  parallel_for(ensemble.size(), [&](std::size_t m) {
    const double vt = ensemble.v_theta[m];
    const double vr = ensemble.v_r[m];
    const double r = ensemble.r[m];
    const double r_v = weights.alpha_v * vt * (vr - weights.v_r_target) +
                       weights.beta_v * vt * (vr - means.v_r);
    const double r_r =
        weights.alpha_r * vt * (r - weights.r_target) + weights.beta_r * vt * (r - means.r);
    b[m] = project((r_v + r_r) / weights.gamma, weights.bound);
  });
  return b;
}

std::vector<double> broadcast_to_particles(std::span<const double> cell_values,
                                           std::span<const int> cell_of_particle) {
  std::vector<double> out(cell_of_particle.size());
  parallel_for(out.size(), [&](std::size_t m) {
    out[m] = cell_values[static_cast<std::size_t>(cell_of_particle[m])];
  });
  return out;
}

}  // namespace polarpic
