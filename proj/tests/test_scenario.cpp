#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mvtk/scenario.hpp"
#include "mvtk/toml.hpp"

using namespace mvtk;
namespace sc = mvtk::scenario;

TEST_CASE("toml subset parser") {
  SUBCASE("tables, scalars and arrays") {
    const auto tab = toml::parse(
        "# comment\n"
        "scenario = \"landau\"\n"
        "seed = 7\n\n"
        "[grid]\n"
        "Nx = 64   # inline comment\n"
        "L = 12.566370614359172\n"
        "neutralize = true\n"
        "[run]\n"
        "dt = 2e-2\n"
        "modes = [1, 2, 3]\n");
    CHECK(tab.at("scenario").as_string() == "landau");
    CHECK(tab.at("seed").as_int() == 7);
    CHECK(tab.at("grid.Nx").as_int() == 64);
    CHECK(tab.at("grid.L").as_number() == doctest::Approx(12.566370614359172));
    CHECK(tab.at("grid.neutralize").as_bool());
    CHECK(tab.at("run.dt").as_number() == doctest::Approx(0.02));
    CHECK(tab.at("run.modes").as_array().size() == 3);
  }

  SUBCASE("parse errors carry position") {
    try {
      toml::parse("x = \n");
      CHECK(false);
    } catch (const toml::ParseError& e) {
      CHECK(e.line == 1);
    }
    CHECK_THROWS_AS(toml::parse("a = 1\na = 2\n"), toml::ParseError);
    CHECK_THROWS_AS(toml::parse("[t\nx = 1\n"), toml::ParseError);
  }
}

TEST_CASE("parse_config") {
  SUBCASE("minimal landau config fills the documented defaults") {
    const sc::RunConfig cfg = sc::parse_config("scenario = \"landau\"\n");
    CHECK(cfg.scenario == sc::Name::landau);
    CHECK(cfg.grid.Nx == 64);
    CHECK(cfg.grid.Nv == 256);
    CHECK(cfg.grid.L == doctest::Approx(4.0 * M_PI));
    CHECK(cfg.params.epsilon == doctest::Approx(1e-3));
  }

  SUBCASE("negative dt is rejected naming the key") {
    try {
      sc::parse_config("scenario = \"landau\"\n[run]\ndt = -0.1\n");
      CHECK(false);
    } catch (const sc::ConfigError& e) {
      REQUIRE(e.violations.size() == 1);
      CHECK(e.violations[0].find("dt") != std::string::npos);
    }
  }

  SUBCASE("unknown key is rejected naming the key") {
    try {
      sc::parse_config("scenario = \"landau\"\n[grid]\ndx = 0.1\n");
      CHECK(false);
    } catch (const sc::ConfigError& e) {
      REQUIRE(e.violations.size() == 1);
      CHECK(e.violations[0].find("dx") != std::string::npos);
    }
  }

  SUBCASE("every violation is listed at once") {
    try {
      sc::parse_config(
          "scenario = \"landau\"\nbogus = 1\n[run]\ndt = -1\nepsilon = -2\n");
      CHECK(false);
    } catch (const sc::ConfigError& e) {
      CHECK(e.violations.size() == 3);
    }
  }

  SUBCASE("scenario/subcommand mismatch is caught") {
    CHECK_THROWS_AS(
        sc::parse_config("scenario = \"landau\"\n", sc::Name::two_stream),
        sc::ConfigError);
  }

  SUBCASE("resolution presets apply before explicit keys") {
    const sc::RunConfig low =
        sc::parse_config("scenario = \"landau\"\nresolution = \"low\"\n");
    CHECK(low.grid.Nx == 32);
    CHECK(low.grid.Nv == 64);
    const sc::RunConfig mixed = sc::parse_config(
        "scenario = \"landau\"\nresolution = \"low\"\n[grid]\nNv = 100\n");
    CHECK(mixed.grid.Nx == 32);
    CHECK(mixed.grid.Nv == 100);
  }
}

TEST_CASE("reports are deterministic for a fixed seed") {
  const sc::RunConfig cfg = sc::default_config(sc::Name::bracket_check);
  const sc::Report a = sc::bracket_check(cfg);
  const sc::Report b = sc::bracket_check(cfg);
  CHECK(a.json.dump() == b.json.dump());

  sc::RunConfig other = cfg;
  other.seed = 43;
  const sc::Report c = sc::bracket_check(other);
  CHECK(a.json.dump() != c.json.dump());  // the seed is actually consumed
}

TEST_CASE("run_scenario writes the artifact set") {
  namespace fs = std::filesystem;
  const std::string out = (fs::temp_directory_path() / "mvtk_scenario_test").string();
  fs::remove_all(out);
  sc::RunConfig cfg = sc::default_config(sc::Name::gnh_demo);
  cfg.out_dir = out;
  const int status = sc::run_scenario(cfg);
  CHECK(status == 0);
  CHECK(fs::exists(out + "/report.json"));
  CHECK(fs::exists(out + "/summary.json"));
  CHECK(fs::exists(out + "/effective_config.json"));
  std::ifstream rep(out + "/report.json");
  std::stringstream ss;
  ss << rep.rdbuf();
  CHECK(ss.str().find("\"anchor\"") != std::string::npos);
  fs::remove_all(out);
}
