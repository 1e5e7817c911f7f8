#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "polarpic/geometry.hpp"

using namespace polarpic;
using std::numbers::pi;

TEST_CASE("fine cell lookup") {
  const GridSpec g{{5.0, 8.0}, 64, 64};
  CHECK(locate_fine_cell(6.5, pi, g) == CellIndex{32, 32});
  CHECK(locate_fine_cell(5.0, 0.0, g) == CellIndex{0, 0});
  CHECK(locate_fine_cell(8.0, kTwoPi - 1e-12, g) == CellIndex{63, 63});
  // Angles are wrapped before lookup.
  CHECK(locate_fine_cell(6.5, pi + kTwoPi, g) == CellIndex{32, 32});
  CHECK(locate_fine_cell(6.5, -1e-9, g).j == 63);
  CHECK_THROWS_AS(locate_fine_cell(4.999, 0.0, g), DomainError);
  CHECK_THROWS_AS(locate_fine_cell(8.001, 0.0, g), DomainError);
  CHECK_THROWS_AS(locate_fine_cell(NAN, 0.0, g), DomainError);
}

TEST_CASE("grid geometry") {
  const GridSpec g{{5.0, 8.0}, 64, 32};
  CHECK(g.dr() == doctest::Approx(3.0 / 64));
  CHECK(g.dtheta() == doctest::Approx(kTwoPi / 32));
  CHECK(g.r_center(0) == doctest::Approx(5.0 + 1.5 / 64));
  CHECK(g.flat(2, 3) == 2u * 32 + 3);
  double area = 0.0;
  for (int i = 0; i < g.m_r; ++i) area += g.cell_area(i) * g.m_theta;
  CHECK(area == doctest::Approx(g.domain.area()).epsilon(1e-13));
  CHECK(g.domain.area() == doctest::Approx(pi * (64.0 - 25.0)));
}

TEST_CASE("degenerate geometry is rejected") {
  CHECK_THROWS_AS((AnnulusDomain{8.0, 5.0}.validate()), DomainError);
  CHECK_THROWS_AS((AnnulusDomain{0.0, 5.0}.validate()), DomainError);
  CHECK_THROWS_AS((GridSpec{{5, 8}, 0, 64}.validate()), DomainError);
  CHECK_THROWS_AS(ControlPartition({5, 8}, 0, 1, 100.0), DomainError);
  CHECK_THROWS_AS(ControlPartition({5, 8}, 4, 1, 0.0), DomainError);
}

TEST_CASE("control cell lookup") {
  const ControlPartition bands({5.0, 8.0}, 4, 1, 100.0);
  // 0-based flat index; the third band [6.5, 7.25) has k = 2.
  CHECK(bands.locate(6.5, pi) == 2);
  CHECK(bands.locate(5.1, 0.0) == 0);
  CHECK(bands.locate(8.0, 0.0) == 3);
  const ControlPartition single({5.0, 8.0}, 1, 1, 100.0);
  CHECK(single.locate(7.9, 3.0) == 0);
  const ControlPartition grid2({5.0, 8.0}, 2, 4, 100.0);
  CHECK(grid2.locate(7.0, 0.5 * pi + 0.1) == grid2.flat(1, 1));
  CHECK_THROWS_AS(grid2.locate(4.0, 0.0), DomainError);
}

TEST_CASE("control partition must be coarser than the field grid") {
  const GridSpec g{{5.0, 8.0}, 8, 8};
  CHECK_NOTHROW(ControlPartition({5, 8}, 8, 8, 1.0).check_coarser_than(g));
  CHECK_THROWS_AS(ControlPartition({5, 8}, 16, 1, 1.0).check_coarser_than(g), DomainError);
  CHECK_THROWS_AS(ControlPartition({5, 8}, 1, 9, 1.0).check_coarser_than(g), DomainError);
  CHECK_THROWS_AS(ControlPartition({5, 9}, 1, 1, 1.0).check_coarser_than(g), DomainError);
}

TEST_CASE("control values are clamped on store") {
  ControlPartition p({5, 8}, 3, 1, 100.0);
  p.set_values({250.0, -1e9, 3.5});
  CHECK(p.values() == std::vector<double>{100.0, -100.0, 3.5});
  CHECK_THROWS_AS(p.set_values({1.0}), DomainError);
}

TEST_CASE("angle helpers") {
  CHECK(wrap_angle(kTwoPi + 0.3) == doctest::Approx(0.3));
  CHECK(wrap_angle(-0.25) == doctest::Approx(kTwoPi - 0.25));
  CHECK(wrap_angle(kTwoPi) == 0.0);
  const double w = wrap_angle(-1e-300);
  CHECK(w >= 0.0);
  CHECK(w < kTwoPi);
  CHECK(angular_difference(0.01, kTwoPi - 0.01) == doctest::Approx(0.02));
  CHECK(angular_difference(kTwoPi - 0.01, 0.01) == doctest::Approx(-0.02));
  CHECK(angular_difference(pi, 0.0) == doctest::Approx(pi));
}

TEST_CASE("polar and cartesian states") {
  auto c = polar_to_cartesian({1.0, 0.0, 0.0, 1.0});
  CHECK(c.x == doctest::Approx(1.0));
  CHECK(c.y == doctest::Approx(0.0));
  CHECK(c.v_x == doctest::Approx(0.0));
  CHECK(c.v_y == doctest::Approx(1.0));
  c = polar_to_cartesian({2.0, pi / 2, 1.0, 0.0});
  CHECK(c.x == doctest::Approx(0.0));
  CHECK(c.y == doctest::Approx(2.0));
  CHECK(c.v_x == doctest::Approx(0.0));
  CHECK(c.v_y == doctest::Approx(1.0));

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int n = 0; n < 1000; ++n) {
    const CartesianState s{u(rng), u(rng), u(rng), u(rng)};
    const CartesianState back = polar_to_cartesian(cartesian_to_polar(s));
    const double scale = std::hypot(s.x, s.y) + std::hypot(s.v_x, s.v_y);
    CHECK(std::abs(back.x - s.x) <= 1e-12 * scale);
    CHECK(std::abs(back.y - s.y) <= 1e-12 * scale);
    CHECK(std::abs(back.v_x - s.v_x) <= 1e-12 * scale);
    CHECK(std::abs(back.v_y - s.v_y) <= 1e-12 * scale);
  }
}
