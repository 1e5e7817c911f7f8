#include "polarpic/pusher.hpp"

#include <cmath>
#include <string>

#include "polarpic/parallel.hpp"

namespace polarpic {

void push(ParticleEnsemble& ensemble, const StepInputs& inputs, const AnnulusDomain& domain) {
  const std::size_t n = ensemble.size();
  if (!(inputs.h > 0.0) || !std::isfinite(inputs.h)) {
    throw IntegrationError("time step must be positive and finite");
  }
  if (inputs.e_r.size() != n || inputs.e_theta.size() != n || inputs.b_field.size() != n) {
    throw IntegrationError("step inputs do not match the particle count");
  }
  const double h = inputs.h;
  parallel_for(n, [&](std::size_t m) {
    const double r = ensemble.r[m];
    const double vr = ensemble.v_r[m];
    const double vt = ensemble.v_theta[m];
    const double er = inputs.e_r[m];
    const double et = inputs.e_theta[m];
    const double a = h * (inputs.b_field[m] + vt / r);

    const double vt_new = (vt + h * et - a * (vr + h * er)) / (1.0 + a * a);
    const double vr_new = vr + h * er + a * vt_new;
    const double r_new = r + h * vr_new;
    if (!(r_new > 0.0)) {
      throw IntegrationError("particle " + std::to_string(m) +
                             " reached r <= 0; reduce the time step");
    }
    ensemble.v_theta[m] = vt_new;
    ensemble.v_r[m] = vr_new;
    ensemble.r[m] = r_new;
    ensemble.theta[m] += h * vt_new / r_new;
  });
  apply_boundaries(ensemble, domain);
}

}  // namespace polarpic
