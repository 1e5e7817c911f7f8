#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "polarpic/geometry.hpp"

namespace polarpic {

/// Raised when the time integration leaves the regime where the step is
/// meaningful (particles jumping across the whole annulus, r <= 0).
class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Structure-of-arrays particle state. Every particle carries weight 1/N.
struct ParticleEnsemble {
  std::vector<double> r;
  std::vector<double> theta;
  std::vector<double> v_r;
  std::vector<double> v_theta;

  ParticleEnsemble() = default;
  explicit ParticleEnsemble(std::size_t n) : r(n), theta(n), v_r(n), v_theta(n) {}

  std::size_t size() const { return r.size(); }
  bool empty() const { return r.empty(); }
  void resize(std::size_t n) {
    r.resize(n);
    theta.resize(n);
    v_r.resize(n);
    v_theta.resize(n);
  }
  void push_back(double r_, double theta_, double v_r_, double v_theta_) {
    r.push_back(r_);
    theta.push_back(theta_);
    v_r.push_back(v_r_);
    v_theta.push_back(v_theta_);
  }

  friend bool operator==(const ParticleEnsemble&, const ParticleEnsemble&) = default;
};

/// Perturbed Gaussian ring rho0(r, theta) = (1 + alpha cos(k theta))
/// exp(-width (r - center)^2) / (2 pi) with Maxwellian velocities.
struct InitialConditionSpec {
  double alpha = 0.3;
  int mode = 3;
  double center = 6.5;
  double width = 4.0;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Unnormalized ring density per unit area.
double diocotron_density(double r, double theta, const InitialConditionSpec& spec);

/// Draws n particles with positions distributed as rho0(r, theta) r dr dtheta
/// (rejection sampling against a constant envelope) and independent unit
/// Gaussian velocity components. Deterministic in spec.seed.
ParticleEnsemble sample_diocotron(const InitialConditionSpec& spec, std::size_t n,
                                  const AnnulusDomain& domain);

/// Wraps theta into [0, 2*pi) and reflects particles specularly at the
/// radial walls (r <- 2 r_wall - r, v_r <- -v_r). Throws IntegrationError if a
/// particle is still outside after one reflection.
void apply_boundaries(ParticleEnsemble& ensemble, const AnnulusDomain& domain);

/// CSV with header `r,theta,v_r,v_theta`.
void write_particles_csv(std::ostream& os, const ParticleEnsemble& ensemble);

}  // namespace polarpic
