#pragma once

#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "polarpic/ensemble.hpp"
#include "polarpic/geometry.hpp"

namespace polarpic {

/// Cell-centered fields on the annular grid, all of shape m_r x m_theta.
struct FieldGrid {
  GridSpec grid;
  std::vector<double> rho;
  std::vector<double> phi;
  std::vector<double> e_r;
  std::vector<double> e_theta;

  FieldGrid() = default;
  explicit FieldGrid(const GridSpec& g)
      : grid(g), rho(g.size()), phi(g.size()), e_r(g.size()), e_theta(g.size()) {}
};

/// Nearest-grid-point deposition: rho_ij = count_ij / (N r_i dr dtheta).
std::vector<double> deposit_density(const ParticleEnsemble& ensemble, const GridSpec& grid);

/// Per-particle flattened fine-cell indices.
std::vector<std::size_t> locate_particles(const ParticleEnsemble& ensemble, const GridSpec& grid);

/// Direct solver for the 5-point cell-centered polar Laplacian
///
///   (1/r_i) [r_{i+1/2}(phi_{i+1} - phi_i) - r_{i-1/2}(phi_i - phi_{i-1})] / dr^2
///     + (phi_{j+1} - 2 phi_j + phi_{j-1}) / (r_i dtheta)^2 = -(rho - background)
///
/// with phi = 0 on both radial walls (antisymmetric ghost cells) and periodic
/// theta. A real FFT along theta decouples the grid into m_theta/2 + 1
/// tridiagonal systems in r. Construction is not thread-safe (FFTW planning);
/// solve() is.
class PoissonSolver {
 public:
  explicit PoissonSolver(const GridSpec& grid);
  ~PoissonSolver();
  PoissonSolver(PoissonSolver&&) noexcept;
  PoissonSolver& operator=(PoissonSolver&&) noexcept;
  PoissonSolver(const PoissonSolver&) = delete;
  PoissonSolver& operator=(const PoissonSolver&) = delete;

  const GridSpec& grid() const { return grid_; }

  std::vector<double> solve(std::span<const double> rho, double background = 0.0) const;

 private:
  struct Plans;
  GridSpec grid_;
  std::unique_ptr<Plans> plans_;
};

/// Convenience wrapper that plans and solves once.
std::vector<double> solve_poisson(std::span<const double> rho, const GridSpec& grid,
                                  double background = 0.0);

/// Max-norm residual of the discrete operator above, evaluated directly in
/// real space.
double poisson_residual(std::span<const double> phi, std::span<const double> rho,
                        const GridSpec& grid, double background = 0.0);

/// E = -grad phi. Centered differences in the interior, second-order
/// one-sided differences through the wall value phi = 0 at i = 0 and
/// i = m_r - 1, periodic in theta.
void compute_efield(std::span<const double> phi, const GridSpec& grid, std::span<double> e_r,
                    std::span<double> e_theta);

/// NGP gather: each particle receives the value of the fine cell containing it.
void gather_field(const ParticleEnsemble& ensemble, const GridSpec& grid,
                  std::span<const double> e_r, std::span<const double> e_theta,
                  std::span<double> e_r_out, std::span<double> e_theta_out);

/// Matrix CSV: one row per radial index, one column per angular index,
/// preceded by `# m_r m_theta r_min r_max t`.
void write_grid_csv(std::ostream& os, const GridSpec& grid, std::span<const double> values,
                    double t);

}  // namespace polarpic
