#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "polarpic/driver.hpp"
#include "polarpic/parallel.hpp"
#include "polarpic/pusher.hpp"

using namespace polarpic;
namespace fs = std::filesystem;

namespace {

RunConfig small(const std::string& preset, std::size_t n = 4000, double t_f = 5.0) {
  RunConfig c = preset_config(preset);
  c.particles = n;
  c.t_f = t_f;
  c.snapshot_times = {};
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string diagnostics_text(const RunConfig& c) {
  const auto res = run(c);
  std::ostringstream os;
  write_diagnostics_csv(os, res.series, res.control_cells);
  return os.str();
}

}  // namespace

TEST_CASE("zero final time gives the initial snapshot only") {
  RunConfig c = small("diocotron-uncontrolled");
  c.t_f = 0.0;
  c.snapshot_times = {0.0, 5.0};
  const auto res = run(c);
  CHECK(res.series.empty());
  REQUIRE(res.snapshots.size() == 1);
  CHECK(res.snapshots[0].tag == "0");
  CHECK(res.snapshots[0].t == 0.0);
  CHECK(res.final_state == sample_diocotron(c.initial_condition(), c.particles, c.domain()));
}

TEST_CASE("snapshots snap to steps") {
  RunConfig c = small("diocotron-uncontrolled", 500, 3.0);
  c.snapshot_times = {1.0, 1.2, 2.9, 50.0};
  c.write_particles = true;
  const auto res = run(c);
  CHECK(res.series.size() == 6);
  REQUIRE(res.snapshots.size() == 3);
  CHECK(res.snapshots[1].tag == "1");
  CHECK(res.snapshots[1].t == 1.0);
  CHECK(res.snapshots[2].tag == "2.9");
  CHECK(res.snapshots[2].t == 3.0);
  CHECK(res.snapshots[2].particles.has_value());
  CHECK(*res.snapshots[2].particles == res.final_state);
  CHECK(res.series.back().t == 3.0);
}

TEST_CASE("uncontrolled field is the configured constant") {
  RunConfig c = small("diocotron-uncontrolled");
  c.b_const = 250.0;  // above M: not clamped in uncontrolled mode
  Simulation sim(c);
  const auto rec = sim.step();
  REQUIRE(rec);
  for (double b : sim.applied_b()) CHECK(b == 250.0);
  for (double b : rec->b_cells) CHECK(b == 250.0);
  CHECK(rec->t == 0.5);
}

TEST_CASE("one step re-run outside the driver") {
  const RunConfig c = preset_config("diocotron-s2");
  Simulation sim(c);
  const ParticleEnsemble before = sim.state();
  const auto rec = sim.step();
  REQUIRE(rec);

  const GridSpec g = c.grid();
  const ControlPartition part = c.partition();
  const auto rho = deposit_density(before, g);
  const auto phi = solve_poisson(rho, g);
  std::vector<double> er(g.size()), et(g.size()), per(before.size()), pet(before.size());
  compute_efield(phi, g, er, et);
  gather_field(before, g, er, et, per, pet);
  CHECK(per == sim.gathered_e_r());
  CHECK(pet == sim.gathered_e_theta());

  const auto pointwise = strategy_two_pointwise(before, per, c.weights, ensemble_means(before), c.h);
  const auto cells = interpolate_control(pointwise, before, part);
  CHECK(pointwise == sim.pointwise_b());
  CHECK(cells == sim.applied_b_cells());
  CHECK(cells == rec->b_cells);

  ParticleEnsemble after = before;
  const auto applied = broadcast_to_particles(cells, locate_control_cells(before, part));
  push(after, StepInputs{c.h, per, pet, applied}, c.domain());
  CHECK(after == sim.state());

  const auto j = pointwise_cost_terms(after, c.weights, pointwise, c.h);
  CHECK(rec->cost.total() == j.total());
  CHECK(rec->boundary.energy == boundary_thermal_energy(after, g).energy);
  for (double b : rec->b_cells) CHECK(std::abs(b) <= c.weights.bound);
}

TEST_CASE("strategy one step uses cell statistics of the pre-step state") {
  const RunConfig c = small("diocotron-s1");
  Simulation sim(c);
  const ParticleEnsemble before = sim.state();
  sim.step(false);
  const auto stats = cell_statistics(before, c.partition(), sim.gathered_e_r());
  const auto expect =
      strategy_one(stats, before, sim.gathered_e_r(), c.weights, c.partition(), c.h);
  CHECK(expect == sim.applied_b_cells());
  CHECK(sim.pointwise_b().empty());
}

TEST_CASE("zero weights reproduce the uncontrolled run with B = 0") {
  RunConfig base = small("diocotron-uncontrolled", 3000, 3.0);
  base.b_const = 0.0;
  base.h = 0.05;
  const auto ref = run(base).final_state;
  for (const auto mode : {ControlMode::strategy_one, ControlMode::strategy_two}) {
    RunConfig c = base;
    c.mode = mode;
    c.weights = ControlWeights{};
    CHECK(run(c).final_state == ref);
  }
}

TEST_CASE("diagnostics are bitwise independent of the thread count") {
  for (const char* preset : {"diocotron-uncontrolled", "diocotron-s1", "diocotron-s2"}) {
    RunConfig c = small(preset, 20000, 10.0);
    c.threads = 1;
    const std::string one = diagnostics_text(c);
    c.threads = 3;
    const std::string three = diagnostics_text(c);
    c.threads = 8;
    const std::string eight = diagnostics_text(c);
    CHECK(one == three);
    CHECK(one == eight);
  }
  set_thread_count(1);
}

TEST_CASE("run outputs on disk") {
  const fs::path dir = fs::path(POLARPIC_TEST_TMP) / "outputs";
  fs::remove_all(dir);
  RunConfig c = small("diocotron-s1", 1000, 2.0);
  c.snapshot_times = {1.0};
  c.write_particles = true;
  const auto res = run(c);
  write_run_outputs(res, c, dir);
  for (const char* f : {"diagnostics.csv", "density_t0.csv", "density_t1.csv", "particles_t0.csv",
                        "particles_t1.csv", "config.json"}) {
    CHECK_MESSAGE(fs::exists(dir / f), f);
  }
  const std::string diag = slurp(dir / "diagnostics.csv");
  CHECK(diag.rfind(diagnostics_header(4) + "\n", 0) == 0);
  CHECK(diagnostics_header(2) ==
        "t,E_b,rho_b,U_b_r,U_b_theta,J_pos,J_posvar,J_vel,J_velvar,J_ctrl,mode_amp,B_1,B_2");
  std::size_t lines = 0;
  for (char ch : diag) lines += ch == '\n';
  CHECK(lines == 5);
  CHECK(slurp(dir / "density_t1.csv").rfind("# 64 64 5 8 1\n", 0) == 0);
  CHECK(to_json(load_config(dir / "config.json")) == to_json(c));
}

TEST_CASE("numerical failures carry the step index") {
  RunConfig c = small("diocotron-uncontrolled", 1000, 100.0);
  c.b_const = 0.0;
  c.h = 50.0;
  try {
    run(c);
    FAIL("expected a numerical failure");
  } catch (const NumericalFailure& e) {
    CHECK(e.step() == 0);
    CHECK(std::string(e.what()).find("step 0") == 0);
  }
}

TEST_CASE("convergence study") {
  RunConfig c = preset_config("validate");
  c.particles = 500;
  c.t_f = 0.05;

  const auto same = convergence_study(c, {256}, 256);
  CHECK(same.rows[0].error == 0.0);

  // Short horizon with h B << 1: the asymptotic first-order regime.
  c.particles = 2000;
  c.t_f = 0.1;
  const auto t = convergence_study(c, {64, 128, 256, 512}, 4096);
  REQUIRE(t.rows.size() == 4);
  CHECK(t.rows[0].h == doctest::Approx(0.1 / 64));
  CHECK(t.slope == doctest::Approx(1.0).epsilon(0.1));
  for (double q : t.ratios) {
    CHECK(q > 1.7);
    CHECK(q < 2.3);
  }
  CHECK_THROWS_AS(convergence_study(c, {0}, 10), ConfigError);
}
