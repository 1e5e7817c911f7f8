#include "polarpic/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace polarpic {

double wrap_angle(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  // fmod of a tiny negative number plus 2*pi can round up to exactly 2*pi.
  if (t >= kTwoPi) t = 0.0;
  return t;
}

double angular_difference(double a, double b) {
  double d = std::remainder(a - b, kTwoPi);
  if (d <= -std::numbers::pi) d += kTwoPi;
  return d;
}

void AnnulusDomain::validate() const {
  if (!(r_min > 0.0) || !(r_max > r_min)) {
    throw DomainError("annulus requires 0 < r_min < r_max, got r_min=" +
                      std::to_string(r_min) + " r_max=" + std::to_string(r_max));
  }
}

void GridSpec::validate() const {
  domain.validate();
  if (m_r < 2 || m_theta < 2) {
    throw DomainError("grid requires m_r >= 2 and m_theta >= 2");
  }
}

CellIndex locate_fine_cell(double r, double theta, const GridSpec& grid) {
  const AnnulusDomain& d = grid.domain;
  if (!(r >= d.r_min && r <= d.r_max)) {
    throw DomainError("radius " + std::to_string(r) + " outside [" +
                      std::to_string(d.r_min) + ", " + std::to_string(d.r_max) + "]");
  }
  const int i = std::clamp(static_cast<int>(std::floor((r - d.r_min) / grid.dr())), 0,
                           grid.m_r - 1);
  const int j = std::min(static_cast<int>(wrap_angle(theta) / grid.dtheta()),
                         grid.m_theta - 1);
  return {i, j};
}

ControlPartition::ControlPartition(AnnulusDomain domain, int n_r, int n_theta, double bound)
    : domain_(domain), n_r_(n_r), n_theta_(n_theta), bound_(bound) {
  domain_.validate();
  if (n_r < 1 || n_theta < 1) throw DomainError("control partition needs n_r, n_theta >= 1");
  if (!(bound > 0.0)) throw DomainError("control bound M must be positive");
  values_.assign(static_cast<std::size_t>(size()), 0.0);
}

int ControlPartition::locate(double r, double theta) const {
  if (!(r >= domain_.r_min && r <= domain_.r_max)) {
    throw DomainError("radius " + std::to_string(r) + " outside control partition");
  }
  const int ir = std::clamp(static_cast<int>(std::floor((r - domain_.r_min) / dr())), 0,
                            n_r_ - 1);
  const int jt = std::min(static_cast<int>(wrap_angle(theta) / dtheta()), n_theta_ - 1);
  return flat(ir, jt);
}

void ControlPartition::check_coarser_than(const GridSpec& grid) const {
  // Relative slack so that n_r == m_r passes despite rounding.
  constexpr double kSlack = 1e-12;
  if (domain_.r_min != grid.domain.r_min || domain_.r_max != grid.domain.r_max) {
    throw DomainError("control partition and field grid cover different annuli");
  }
  if (dr() < grid.dr() * (1.0 - kSlack) || dtheta() < grid.dtheta() * (1.0 - kSlack)) {
    throw DomainError("control partition " + std::to_string(n_r_) + "x" +
                      std::to_string(n_theta_) + " is finer than the field grid " +
                      std::to_string(grid.m_r) + "x" + std::to_string(grid.m_theta));
  }
}

void ControlPartition::set_values(const std::vector<double>& values) {
  if (values.size() != values_.size()) {
    throw DomainError("control value count does not match partition size");
  }
  for (std::size_t k = 0; k < values.size(); ++k) {
    values_[k] = std::clamp(values[k], -bound_, bound_);
  }
}

CartesianState polar_to_cartesian(const PolarState& s) {
  const double c = std::cos(s.theta);
  const double sn = std::sin(s.theta);
  return {s.r * c, s.r * sn, s.v_r * c - s.v_theta * sn, s.v_r * sn + s.v_theta * c};
}

PolarState cartesian_to_polar(const CartesianState& s) {
  const double r = std::hypot(s.x, s.y);
  const double theta = wrap_angle(std::atan2(s.y, s.x));
  const double c = std::cos(theta);
  const double sn = std::sin(theta);
  return {r, theta, s.v_x * c + s.v_y * sn, -s.v_x * sn + s.v_y * c};
}

}  // namespace polarpic
