#pragma once

#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace polarpic {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Raised when a point lies outside the annulus or a geometric object is
/// malformed.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Reduces an angle into [0, 2*pi).
double wrap_angle(double theta);

/// Shortest signed angular distance a - b, in (-pi, pi].
double angular_difference(double a, double b);

/// Annulus r_min <= r <= r_max, theta periodic on [0, 2*pi).
struct AnnulusDomain {
  double r_min = 5.0;
  double r_max = 8.0;

  void validate() const;
  double width() const { return r_max - r_min; }
  double area() const { return 0.5 * kTwoPi * (r_max * r_max - r_min * r_min); }
  bool contains(double r) const { return r >= r_min && r <= r_max; }
};

struct CellIndex {
  int i = 0;  // radial
  int j = 0;  // angular

  friend bool operator==(const CellIndex&, const CellIndex&) = default;
};

/// Uniform cell-centered m_r x m_theta grid over an annulus. Cell (i, j) has
/// center (r_min + (i + 1/2) dr, (j + 1/2) dtheta); storage is row-major with
/// the angular index fastest.
struct GridSpec {
  AnnulusDomain domain;
  int m_r = 64;
  int m_theta = 64;

  void validate() const;

  double dr() const { return domain.width() / m_r; }
  double dtheta() const { return kTwoPi / m_theta; }
  double r_center(int i) const { return domain.r_min + (i + 0.5) * dr(); }
  double r_face(int i) const { return domain.r_min + i * dr(); }  // face below cell i
  double theta_center(int j) const { return (j + 0.5) * dtheta(); }
  // Area element r_i dr dtheta of cell row i.
  double cell_area(int i) const { return r_center(i) * dr() * dtheta(); }

  std::size_t size() const { return static_cast<std::size_t>(m_r) * m_theta; }
  std::size_t flat(int i, int j) const {
    return static_cast<std::size_t>(i) * m_theta + j;
  }
  std::size_t flat(CellIndex c) const { return flat(c.i, c.j); }
};

/// Maps (r, theta) to its fine cell. r == r_max lands in the last radial
/// cell; throws DomainError when r is outside [r_min, r_max].
CellIndex locate_fine_cell(double r, double theta, const GridSpec& grid);

/// Coarse tiling of the annulus into n_r x n_theta control cells, each
/// holding one value of the external field bounded by |B_k| <= bound.
class ControlPartition {
 public:
  ControlPartition() = default;
  ControlPartition(AnnulusDomain domain, int n_r, int n_theta, double bound);

  const AnnulusDomain& domain() const { return domain_; }
  int n_r() const { return n_r_; }
  int n_theta() const { return n_theta_; }
  int size() const { return n_r_ * n_theta_; }
  double bound() const { return bound_; }
  double dr() const { return domain_.width() / n_r_; }
  double dtheta() const { return kTwoPi / n_theta_; }

  /// Flattened index k = ir * n_theta + jtheta, 0-based.
  int locate(double r, double theta) const;
  int flat(int ir, int jtheta) const { return ir * n_theta_ + jtheta; }

  /// Throws if the coarse tiling is finer than the field grid in either
  /// direction.
  void check_coarser_than(const GridSpec& grid) const;

  const std::vector<double>& values() const { return values_; }
  /// Stores values projected onto [-bound, bound].
  void set_values(const std::vector<double>& values);

 private:
  AnnulusDomain domain_{};
  int n_r_ = 1;
  int n_theta_ = 1;
  double bound_ = 1.0;
  std::vector<double> values_ = std::vector<double>(1, 0.0);
};

struct CartesianState {
  double x, y, v_x, v_y;
};

struct PolarState {
  double r, theta, v_r, v_theta;
};

CartesianState polar_to_cartesian(const PolarState& s);
PolarState cartesian_to_polar(const CartesianState& s);

}  // namespace polarpic
