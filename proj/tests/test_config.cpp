#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "polarpic/config.hpp"

using namespace polarpic;

TEST_CASE("defaults and presets") {
  const RunConfig d;
  CHECK_NOTHROW(d.validate());
  CHECK(d.steps() == 500);

  const auto& u = preset_config("diocotron-uncontrolled");
  CHECK(u.mode == ControlMode::uncontrolled);
  CHECK(u.b_const == 10.0);
  CHECK(u.h == 0.5);
  CHECK(u.t_f == 250.0);
  CHECK(u.m_r == 64);
  CHECK(u.m_theta == 64);

  const auto& s1 = preset_config("diocotron-s1");
  CHECK(s1.mode == ControlMode::strategy_one);
  CHECK(s1.weights.alpha_r == 100.0);
  CHECK(s1.weights.alpha_v == 5.0);
  CHECK(s1.weights.beta_r == 10.0);
  CHECK(s1.weights.beta_v == 5.0);
  CHECK(s1.weights.gamma == 1e-4);
  CHECK(s1.weights.bound == 100.0);
  CHECK(preset_config("diocotron-s2").mode == ControlMode::strategy_two);

  const auto& v = preset_config("validate");
  CHECK(v.particles == 10000);
  CHECK(v.t_f == 10.0);
  CHECK(v.steps() == 4096);

  for (const auto& p : presets()) CHECK_NOTHROW(p.config.validate());
  CHECK_THROWS_AS(preset_config("nope"), ConfigError);
}

TEST_CASE("json round trip") {
  RunConfig c = preset_config("diocotron-s1");
  c.seed = 99;
  c.snapshot_times = {1.5, 2.0};
  c.weights.r_target_cells = {6.0, 6.2, 6.4, 6.6};
  c.comment = "quote \" and backslash \\";
  c.charge = 2.5;
  const RunConfig back = parse_config(to_json(c));
  CHECK(to_json(back) == to_json(c));
  CHECK(back.seed == 99);
  CHECK(back.weights.r_target_cells.size() == 4);
  CHECK(back.charge == 2.5);

  // Emission order is the key table order.
  const std::string text = to_json(c, -1);
  std::size_t last = 0;
  for (const auto& key : config_keys()) {
    const auto at = text.find("\"" + key + "\":");
    REQUIRE(at != std::string::npos);
    CHECK(at >= last);
    last = at;
  }
}

TEST_CASE("partial documents keep base values") {
  const RunConfig c = parse_config(R"({"N": 1e5, "mode": "s2", "M": 50})",
                                   preset_config("diocotron-s1"));
  CHECK(c.particles == 100000);
  CHECK(c.mode == ControlMode::strategy_two);
  CHECK(c.weights.bound == 50.0);
  CHECK(c.weights.alpha_r == 100.0);
}

TEST_CASE("malformed documents are rejected") {
  CHECK_THROWS_AS(parse_config("{"), ConfigError);
  CHECK_THROWS_AS(parse_config("[1, 2]"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"bogus": 1})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"N": "many"})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"N": -4})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"m_r": 2.5})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"mode": "sideways"})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"write_particles": 1})"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("validation") {
  auto bad = [](auto mutate) {
    RunConfig c;
    mutate(c);
    CHECK_THROWS_AS(c.validate(), ConfigError);
  };
  bad([](RunConfig& c) { c.particles = 0; });
  bad([](RunConfig& c) { c.r_min = 9.0; });
  bad([](RunConfig& c) { c.m_r = 1; });
  bad([](RunConfig& c) { c.n_r = 100; });
  bad([](RunConfig& c) { c.h = 0.0; });
  bad([](RunConfig& c) { c.t_f = -1.0; });
  bad([](RunConfig& c) { c.ic_alpha = 1.0; });
  bad([](RunConfig& c) { c.weights.gamma = 0.0; });
  bad([](RunConfig& c) { c.weights.r_target_cells = {1.0}; });
  bad([](RunConfig& c) { c.snapshot_times = {-1.0}; });
  bad([](RunConfig& c) { c.charge = 0.0; });
  RunConfig zero;
  zero.t_f = 0.0;
  CHECK_NOTHROW(zero.validate());
  CHECK(zero.steps() == 0);
}

TEST_CASE("single value overrides") {
  RunConfig c;
  set_config_value(c, "mode", "strategy_one");
  CHECK(c.mode == ControlMode::strategy_one);
  set_config_value(c, "h", "0.25");
  CHECK(c.h == 0.25);
  set_config_value(c, "snapshot_times", "[1, 2, 3]");
  CHECK(c.snapshot_times == std::vector<double>{1, 2, 3});
  set_config_value(c, "output_dir", "runs/a");
  CHECK(c.output_dir == "runs/a");
  CHECK_THROWS_AS(set_config_value(c, "nope", "1"), ConfigError);
  CHECK_THROWS_AS(set_config_value(c, "m_r", "lots"), ConfigError);
}

TEST_CASE("config file") {
  const auto path = std::filesystem::temp_directory_path() / "polarpic_test_config.json";
  {
    std::ofstream out(path);
    out << R"({"t_f": 5, "h": 0.5, "seed": 7})";
  }
  const RunConfig c = load_config(path, preset_config("diocotron-s2"));
  CHECK(c.steps() == 10);
  CHECK(c.seed == 7);
  CHECK(c.mode == ControlMode::strategy_two);
  std::filesystem::remove(path);
}

TEST_CASE("mode names") {
  CHECK(parse_control_mode("s1") == ControlMode::strategy_one);
  CHECK(to_string(ControlMode::strategy_two) == "strategy_two");
  for (auto m : {ControlMode::uncontrolled, ControlMode::strategy_one, ControlMode::strategy_two})
    CHECK(parse_control_mode(to_string(m)) == m);
}
