#pragma once

#include <span>

#include "polarpic/ensemble.hpp"
#include "polarpic/geometry.hpp"

namespace polarpic {

/// Per-particle inputs frozen at time level n.
struct StepInputs {
  double h = 0.0;
  std::span<const double> e_r;
  std::span<const double> e_theta;
  std::span<const double> b_field;  // z-component of the external field at each particle
};

/// One step of the first-order semi-implicit scheme. With
/// a = h (B + v_theta^n / r^n) the coupled velocity update is solved in
/// closed form,
///
///   v_theta' = (v_theta + h E_theta - a (v_r + h E_r)) / (1 + a^2)
///   v_r'     = v_r + h E_r + a v_theta'
///   r'       = r + h v_r'
///   theta'   = theta + h v_theta' / r'
///
/// followed by apply_boundaries. Throws IntegrationError if r' <= 0 or a
/// particle overshoots the annulus.
void push(ParticleEnsemble& ensemble, const StepInputs& inputs, const AnnulusDomain& domain);

}  // namespace polarpic
