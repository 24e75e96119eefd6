#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nlcb/config.hpp"
#include "nlcb/rom.hpp"
#include "nlcb/scenario.hpp"

namespace {

std::pair<int, int> parse_probe(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == s.size())
    throw CLI::ValidationError("--probe", "expected node:comp, e.g. 17:1");
  size_t used = 0;
  int node = 0, comp = 0;
  try {
    node = std::stoi(s.substr(0, colon), &used);
    if (used != colon) throw std::invalid_argument("");
    comp = std::stoi(s.substr(colon + 1), &used);
    if (used != s.size() - colon - 1) throw std::invalid_argument("");
  } catch (const std::exception&) {
    throw CLI::ValidationError("--probe", "expected node:comp, e.g. 17:1");
  }
  if (node < 0 || comp < 0 || comp > 2)
    throw CLI::ValidationError("--probe", "node must be >= 0 and comp in {0,1,2}");
  return {node, comp};
}

int run_command(const std::string& path, const std::string& out_dir,
                const std::string& variant_str, const std::vector<std::string>& probe_strs,
                bool zq, bool zq_chi, bool zq_cross, int threads, unsigned long seed) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot open scenario file " << path << "\n";
    return 1;
  }
  std::ostringstream raw;
  raw << in.rdbuf();

  const nlcb::Config cfg = nlcb::Config::parse_string(raw.str(), path);
  const nlcb::Scenario sc = nlcb::load_scenario(cfg);

  nlcb::RunOptions opt;
  if (!variant_str.empty()) opt.variants = {nlcb::variant_from_string(variant_str)};
  if (zq) opt.ablations.push_back(nlcb::QuadraticAblation::All);
  if (zq_chi) opt.ablations.push_back(nlcb::QuadraticAblation::ChiOnly);
  if (zq_cross) opt.ablations.push_back(nlcb::QuadraticAblation::CrossOnly);
  opt.threads = threads;
  opt.seed = seed;
  for (const auto& p : probe_strs) opt.extra_probes.push_back(parse_probe(p));

  const nlcb::ScenarioArtifacts art = nlcb::run_scenario(sc, opt);
  nlcb::write_outputs(art, opt, raw.str(), out_dir);

  std::printf("scenario %s: %d free DoFs -> %d reduced DoFs, f1 = %.4f Hz\n", sc.name.c_str(),
              art.model.n_free, art.rom.model.m, art.f1);
  const int nm = static_cast<int>(art.rom_frequencies.size());
  for (int i = 0; i < std::min(sc.compare_modes, nm); ++i) {
    const double full = art.full_modes.frequency()[i];
    const double rom = art.rom_frequencies[i];
    std::printf("  mode %d: full %9.3f Hz  rom %9.3f Hz  err %.3f%%\n", i + 1, full, rom,
                100.0 * std::abs(rom - full) / full);
  }
  std::printf("  rom construction: %.3f s\n", art.rom_build_s);
  for (const auto& r : art.runs)
    std::printf("  %-26s %8d steps  %.3f s\n", r.label.c_str(),
                static_cast<int>(r.hist.times.size()) - 1, r.wall_s);
  std::printf("  outputs in %s\n", out_dir.c_str());
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlinear Craig-Bampton reduced-order models of planar beam structures"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir = "out";
  std::string variant_str;
  std::vector<std::string> probe_strs;
  bool zq = false, zq_chi = false, zq_cross = false;
  int threads = 0;
  unsigned long seed = 0;

  CLI::App* run = app.add_subcommand("run", "Build, reduce and integrate a scenario");
  run->add_option("scenario", scenario_path, "Scenario config file")->required();
  run->add_option("--out", out_dir, "Output directory (created if missing)");
  run->add_option("--variant", variant_str, "Run only this variant")
      ->check(CLI::IsMember({"full", "linear", "nlcb", "cb"}));
  run->add_flag("--zero-quadratic", zq, "Extra NL-CB run with the quadratic manifold term zeroed");
  run->add_flag("--zero-quadratic-chi", zq_chi,
                "Extra run with the interface-pair quadratic columns zeroed");
  run->add_flag("--zero-quadratic-cross", zq_cross,
                "Extra run with the modal-interface cross columns zeroed");
  run->add_option("--probe", probe_strs, "Extra probe node:comp (0 u, 1 w, 2 theta)");
  run->add_option("--threads", threads, "Kernel threads; 1 forces the serial reference path");
  run->add_option("--seed", seed, "Recorded in the run manifest");

  CLI11_PARSE(app, argc, argv);

  try {
    return run_command(scenario_path, out_dir, variant_str, probe_strs, zq, zq_chi, zq_cross,
                       threads, seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
