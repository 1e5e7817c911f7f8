#include "polarpic/field.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <ostream>

#include <fftw3.h>

#include "polarpic/format.hpp"
#include "polarpic/parallel.hpp"

namespace polarpic {

std::vector<std::size_t> locate_particles(const ParticleEnsemble& ensemble,
                                          const GridSpec& grid) {
  std::vector<std::size_t> cells(ensemble.size());
  parallel_for(ensemble.size(), [&](std::size_t m) {
    cells[m] = grid.flat(locate_fine_cell(ensemble.r[m], ensemble.theta[m], grid));
  });
  return cells;
}

std::vector<double> deposit_density(const ParticleEnsemble& ensemble, const GridSpec& grid) {
  std::vector<double> rho(grid.size(), 0.0);
  if (ensemble.empty()) return rho;
  const auto cells = locate_particles(ensemble, grid);
  std::vector<std::size_t> counts(grid.size(), 0);
  for (const std::size_t c : cells) ++counts[c];
  const double n = static_cast<double>(ensemble.size());
  for (int i = 0; i < grid.m_r; ++i) {
    const double norm = 1.0 / (n * grid.cell_area(i));
    for (int j = 0; j < grid.m_theta; ++j) {
      const std::size_t c = grid.flat(i, j);
      rho[c] = static_cast<double>(counts[c]) * norm;
    }
  }
  return rho;
}

// ---------------------------------------------------------------------------
// Poisson

struct PoissonSolver::Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  std::vector<double> lower, upper, diag_base;  // radial stencil, per row
  std::vector<double> mode_eigen;               // 4 sin^2(pi q / m) / dtheta^2

  ~Plans() {
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
};

PoissonSolver::PoissonSolver(const GridSpec& grid) : grid_(grid), plans_(new Plans) {
  grid_.validate();
  const int mr = grid_.m_r;
  const int mt = grid_.m_theta;
  const int nq = mt / 2 + 1;

  // Plans are created on scratch buffers with FFTW_UNALIGNED so solve() can
  // run them on any std::vector storage via the new-array interface.
  std::vector<double> real(grid_.size());
  std::vector<std::complex<double>> spec(static_cast<std::size_t>(mr) * nq);
  auto* cplx = reinterpret_cast<fftw_complex*>(spec.data());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  plans_->forward =
      fftw_plan_many_dft_r2c(1, &mt, mr, real.data(), nullptr, 1, mt, cplx, nullptr, 1, nq, flags);
  plans_->backward =
      fftw_plan_many_dft_c2r(1, &mt, mr, cplx, nullptr, 1, nq, real.data(), nullptr, 1, mt, flags);
  if (!plans_->forward || !plans_->backward) throw DomainError("FFTW planning failed");

  const double dr2 = grid_.dr() * grid_.dr();
  plans_->lower.resize(mr);
  plans_->upper.resize(mr);
  plans_->diag_base.resize(mr);
  for (int i = 0; i < mr; ++i) {
    const double ri = grid_.r_center(i);
    const double lo = grid_.r_face(i) / (ri * dr2);
    const double up = grid_.r_face(i + 1) / (ri * dr2);
    // Dirichlet ghost phi_{-1} = -phi_0 (resp. phi_{m_r} = -phi_{m_r-1}).
    plans_->lower[i] = (i == 0) ? 0.0 : lo;
    plans_->upper[i] = (i == mr - 1) ? 0.0 : up;
    plans_->diag_base[i] = lo + up + ((i == 0) ? lo : 0.0) + ((i == mr - 1) ? up : 0.0);
  }
  const double dt2 = grid_.dtheta() * grid_.dtheta();
  plans_->mode_eigen.resize(nq);
  for (int q = 0; q < nq; ++q) {
    const double s = std::sin(std::numbers::pi * q / mt);
    plans_->mode_eigen[q] = 4.0 * s * s / dt2;
  }
}

PoissonSolver::~PoissonSolver() = default;
PoissonSolver::PoissonSolver(PoissonSolver&&) noexcept = default;
PoissonSolver& PoissonSolver::operator=(PoissonSolver&&) noexcept = default;

std::vector<double> PoissonSolver::solve(std::span<const double> rho, double background) const {
  if (rho.size() != grid_.size()) throw DomainError("density array does not match grid");
  const int mr = grid_.m_r;
  const int mt = grid_.m_theta;
  const int nq = mt / 2 + 1;

  // Positive-definite form: -L phi = rho - background.
  std::vector<double> real(grid_.size());
  for (std::size_t c = 0; c < real.size(); ++c) {
    if (!std::isfinite(rho[c])) throw DomainError("density contains non-finite values");
    real[c] = rho[c] - background;
  }
  std::vector<std::complex<double>> spec(static_cast<std::size_t>(mr) * nq);
  fftw_execute_dft_r2c(plans_->forward, real.data(), reinterpret_cast<fftw_complex*>(spec.data()));

  const Plans& p = *plans_;
  // Independent tridiagonal solve per angular mode (Thomas algorithm; the
  // system is symmetric-like and strictly diagonally dominant).
#pragma omp parallel
  {
    std::vector<double> c_prime(mr);
    std::vector<std::complex<double>> d_prime(mr);
#pragma omp for schedule(static)
    for (int q = 0; q < nq; ++q) {
      auto at = [&](int i) -> std::complex<double>& {
        return spec[static_cast<std::size_t>(i) * nq + q];
      };
      for (int i = 0; i < mr; ++i) {
        const double ri = grid_.r_center(i);
        const double diag = p.diag_base[i] + p.mode_eigen[q] / (ri * ri);
        // Row i: -lower*x_{i-1} + diag*x_i - upper*x_{i+1} = rhs_i
        const double denom = (i == 0) ? diag : diag + p.lower[i] * c_prime[i - 1];
        c_prime[i] = -p.upper[i] / denom;
        const std::complex<double> prev = (i == 0) ? 0.0 : d_prime[i - 1];
        d_prime[i] = (at(i) + p.lower[i] * prev) / denom;
      }
      at(mr - 1) = d_prime[mr - 1];
      for (int i = mr - 2; i >= 0; --i) at(i) = d_prime[i] - c_prime[i] * at(i + 1);
    }
  }

  fftw_execute_dft_c2r(plans_->backward, reinterpret_cast<fftw_complex*>(spec.data()), real.data());
  const double scale = 1.0 / mt;
  for (double& v : real) v *= scale;
  return real;
}

std::vector<double> solve_poisson(std::span<const double> rho, const GridSpec& grid,
                                  double background) {
  return PoissonSolver(grid).solve(rho, background);
}

double poisson_residual(std::span<const double> phi, std::span<const double> rho,
                        const GridSpec& grid, double background) {
  const int mr = grid.m_r;
  const int mt = grid.m_theta;
  const double dr2 = grid.dr() * grid.dr();
  const double dt2 = grid.dtheta() * grid.dtheta();
  auto value = [&](int i, int j) -> double {
    j = (j + mt) % mt;
    if (i < 0) return -phi[grid.flat(0, j)];
    if (i >= mr) return -phi[grid.flat(mr - 1, j)];
    return phi[grid.flat(i, j)];
  };
  double worst = 0.0;
  for (int i = 0; i < mr; ++i) {
    const double ri = grid.r_center(i);
    for (int j = 0; j < mt; ++j) {
      const double c = value(i, j);
      const double radial =
          (grid.r_face(i + 1) * (value(i + 1, j) - c) - grid.r_face(i) * (c - value(i - 1, j))) /
          (ri * dr2);
      const double angular = (value(i, j + 1) - 2.0 * c + value(i, j - 1)) / (ri * ri * dt2);
      const double res = radial + angular + (rho[grid.flat(i, j)] - background);
      worst = std::max(worst, std::abs(res));
    }
  }
  return worst;
}

void compute_efield(std::span<const double> phi, const GridSpec& grid, std::span<double> e_r,
                    std::span<double> e_theta) {
  const int mr = grid.m_r;
  const int mt = grid.m_theta;
  const double dr = grid.dr();
  const double dt = grid.dtheta();
  for (int i = 0; i < mr; ++i) {
    const double ri = grid.r_center(i);
    for (int j = 0; j < mt; ++j) {
      const std::size_t c = grid.flat(i, j);
      double dphi_dr;
      if (i == 0) {
        // Nodes at the wall (offset -dr/2, phi = 0), r_0 and r_1.
        dphi_dr = (3.0 * phi[c] + phi[grid.flat(1, j)]) / (3.0 * dr);
      } else if (i == mr - 1) {
        dphi_dr = -(3.0 * phi[c] + phi[grid.flat(mr - 2, j)]) / (3.0 * dr);
      } else {
        dphi_dr = (phi[grid.flat(i + 1, j)] - phi[grid.flat(i - 1, j)]) / (2.0 * dr);
      }
      const double up = phi[grid.flat(i, (j + 1) % mt)];
      const double down = phi[grid.flat(i, (j + mt - 1) % mt)];
      e_r[c] = -dphi_dr;
      e_theta[c] = -(up - down) / (2.0 * dt * ri);
    }
  }
}

void gather_field(const ParticleEnsemble& ensemble, const GridSpec& grid,
                  std::span<const double> e_r, std::span<const double> e_theta,
                  std::span<double> e_r_out, std::span<double> e_theta_out) {
  parallel_for(ensemble.size(), [&](std::size_t m) {
    const std::size_t c = grid.flat(locate_fine_cell(ensemble.r[m], ensemble.theta[m], grid));
    e_r_out[m] = e_r[c];
    e_theta_out[m] = e_theta[c];
  });
}

void write_grid_csv(std::ostream& os, const GridSpec& grid, std::span<const double> values,
                    double t) {
  os << "# " << grid.m_r << ' ' << grid.m_theta << ' ' << format_double(grid.domain.r_min) << ' '
     << format_double(grid.domain.r_max) << ' ' << format_double(t) << '\n';
  for (int i = 0; i < grid.m_r; ++i) {
    for (int j = 0; j < grid.m_theta; ++j) {
      if (j) os << ',';
      os << format_double(values[grid.flat(i, j)]);
    }
    os << '\n';
  }
}

}  // namespace polarpic
