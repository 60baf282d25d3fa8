// mvtk: batch scenario runner for the kinetic-plasma geometry toolkit.
//
// One subcommand per scenario; each run writes effective_config.json,
// report.json, summary.json and (for time-evolution scenarios)
// diagnostics.csv into the output directory.  Exit status 0 iff every
// in-scenario check passed.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "mvtk/scenario.hpp"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read config file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mvtk - Maxwell-Vlasov geometry toolkit scenario runner"};
  app.require_subcommand(1);

  struct Options {
    std::string config;
    std::string out = "out";
    long long seed = -1;
    std::string resolution;
  };

  std::vector<std::pair<mvtk::scenario::Name, CLI::App*>> subs;
  Options opt;
  for (auto name : {mvtk::scenario::Name::landau, mvtk::scenario::Name::two_stream,
                    mvtk::scenario::Name::bracket_check, mvtk::scenario::Name::gnh_demo,
                    mvtk::scenario::Name::ec_stability,
                    mvtk::scenario::Name::controlled_stabilization,
                    mvtk::scenario::Name::convergence}) {
    CLI::App* sub = app.add_subcommand(mvtk::scenario::to_string(name), "");
    sub->add_option("--config", opt.config, "TOML configuration file");
    sub->add_option("--out", opt.out, "output directory");
    sub->add_option("--seed", opt.seed, "seed for randomized property checks");
    sub->add_option("--resolution", opt.resolution, "grid preset: low, ref, high")
        ->check(CLI::IsMember({"low", "ref", "high"}));
    subs.emplace_back(name, sub);
  }

  CLI11_PARSE(app, argc, argv);

  try {
    mvtk::scenario::Name scen = mvtk::scenario::Name::landau;
    for (const auto& [name, sub] : subs)
      if (sub->parsed()) scen = name;

    mvtk::scenario::RunConfig cfg;
    if (!opt.config.empty())
      cfg = mvtk::scenario::parse_config(slurp(opt.config), scen);
    else
      cfg = mvtk::scenario::default_config(scen);
    cfg.out_dir = opt.out;
    if (opt.seed >= 0) cfg.seed = static_cast<std::uint64_t>(opt.seed);
    if (!opt.resolution.empty()) {
      // re-apply the preset on top of the parsed grid
      std::string toml = "scenario = \"" + mvtk::scenario::to_string(scen) +
                         "\"\nresolution = \"" + opt.resolution + "\"\n";
      mvtk::scenario::RunConfig preset = mvtk::scenario::parse_config(toml, scen);
      cfg.grid.Nx = preset.grid.Nx;
      cfg.grid.Nv = preset.grid.Nv;
      cfg.resolution = opt.resolution;
    }

    const int status = mvtk::scenario::run_scenario(cfg);
    std::cout << (status == 0 ? "PASS " : "FAIL ")
              << mvtk::scenario::to_string(cfg.scenario) << " -> " << cfg.out_dir
              << "/report.json\n";
    return status;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
