#include "polarpic/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <string>

#include "polarpic/format.hpp"
#include "polarpic/parallel.hpp"

namespace polarpic {

void InitialConditionSpec::validate() const {
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    throw DomainError("perturbation amplitude must lie in [0, 1)");
  }
  if (mode < 1) throw DomainError("perturbation mode number must be a positive integer");
  if (!(width > 0.0)) throw DomainError("ring width parameter must be positive");
}

double diocotron_density(double r, double theta, const InitialConditionSpec& spec) {
  const double dr = r - spec.center;
  return (1.0 + spec.alpha * std::cos(spec.mode * theta)) * std::exp(-spec.width * dr * dr) /
         kTwoPi;
}

namespace {

// max over [r_min, r_max] of r exp(-w (r - c)^2); the stationary point solves
// 2 w r^2 - 2 w c r - 1 = 0.
double radial_envelope(const InitialConditionSpec& spec, const AnnulusDomain& domain) {
  auto profile = [&](double r) {
    const double d = r - spec.center;
    return r * std::exp(-spec.width * d * d);
  };
  const double w = spec.width;
  const double c = spec.center;
  const double r_star = (2.0 * w * c + std::sqrt(4.0 * w * w * c * c + 8.0 * w)) / (4.0 * w);
  double best = std::max(profile(domain.r_min), profile(domain.r_max));
  if (domain.contains(r_star)) best = std::max(best, profile(r_star));
  return best;
}

}  // namespace

ParticleEnsemble sample_diocotron(const InitialConditionSpec& spec, std::size_t n,
                                  const AnnulusDomain& domain) {
  spec.validate();
  domain.validate();
  if (n == 0) throw DomainError("particle count must be at least 1");

  // A single sequential stream: positions for all particles first, then
  // velocities.
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::normal_distribution<double> gaussian(0.0, 1.0);

  // Envelope slightly inflated so rounding in the bound cannot clip the peak.
  const double envelope = (1.0 + spec.alpha) * radial_envelope(spec, domain) * (1.0 + 1e-12);

  ParticleEnsemble out(n);
  for (std::size_t m = 0; m < n; ++m) {
    for (;;) {
      const double r = domain.r_min + domain.width() * uniform(rng);
      const double theta = kTwoPi * uniform(rng);
      // rho0 * r without the 1/(2 pi) prefactor, matching the envelope.
      const double target = kTwoPi * diocotron_density(r, theta, spec) * r;
      if (uniform(rng) * envelope < target) {
        out.r[m] = r;
        out.theta[m] = theta;
        break;
      }
    }
  }
  for (std::size_t m = 0; m < n; ++m) {
    out.v_r[m] = gaussian(rng);
    out.v_theta[m] = gaussian(rng);
  }
  return out;
}

void apply_boundaries(ParticleEnsemble& ensemble, const AnnulusDomain& domain) {
  const double lo = domain.r_min;
  const double hi = domain.r_max;
  bool escaped = false;
  parallel_for(ensemble.size(), [&](std::size_t m) {
    double r = ensemble.r[m];
    if (r < lo) {
      r = 2.0 * lo - r;
      ensemble.v_r[m] = -ensemble.v_r[m];
    } else if (r > hi) {
      r = 2.0 * hi - r;
      ensemble.v_r[m] = -ensemble.v_r[m];
    }
    if (!(r >= lo && r <= hi)) {
#pragma omp atomic write
      escaped = true;
    }
    ensemble.r[m] = r;
    ensemble.theta[m] = wrap_angle(ensemble.theta[m]);
  });
  if (escaped) {
    throw IntegrationError(
        "particle displaced by more than the annulus width in one step; reduce the time step");
  }
}

void write_particles_csv(std::ostream& os, const ParticleEnsemble& ensemble) {
  os << "r,theta,v_r,v_theta\n";
  for (std::size_t m = 0; m < ensemble.size(); ++m) {
    os << format_double(ensemble.r[m]) << ',' << format_double(ensemble.theta[m]) << ','
       << format_double(ensemble.v_r[m]) << ',' << format_double(ensemble.v_theta[m]) << '\n';
  }
}

}  // namespace polarpic
