// Timing harness for the OpenMP kernels against the serial reference path,
// plus a full-vs-ROM integration comparison on a flat-beam scenario.
#include <chrono>
#include <cstdio>
#include <exception>
#include <iostream>
#include <random>
#include <string>

#include <CLI11.hpp>

#include "nlcb/basis.hpp"
#include "nlcb/kernels.hpp"
#include "nlcb/manifold.hpp"
#include "nlcb/model.hpp"
#include "nlcb/partition.hpp"
#include "nlcb/rom.hpp"
#include "nlcb/scenario.hpp"

using namespace nlcb;
using Clock = std::chrono::steady_clock;

namespace {

template <typename F>
double best_of(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = Clock::now();
    f();
    const auto t1 = Clock::now();
    best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
  }
  return best;
}

double rel_diff(const Vec& a, const Vec& b) {
  const double scale = std::max(a.norm(), 1e-300);
  return (a - b).norm() / scale;
}

void bench_kernels(int n_elements, int reps, int threads) {
  const Section sec{5e-3, 5e-4};
  const Material mat{210e9, 7800.0, 0.33};
  BeamModel model = make_beam(n_elements, 0.1, 0.0, sec, mat, 24.85, 3.15e-6);
  const ElementSpan span = model_span(model);

  std::mt19937 rng(12345);
  std::normal_distribution<double> dist(0.0, 1.0);
  Vec d(model.n_free), v(model.n_free), w(model.n_free);
  for (int i = 0; i < model.n_free; ++i) {
    d[i] = 1e-4 * dist(rng);
    v[i] = 1e-4 * dist(rng);
    w[i] = 1e-4 * dist(rng);
  }

  set_parallel_threads(threads);
  std::printf("kernels: %d elements, %d free DoFs, %d threads, best of %d\n", n_elements,
              model.n_free, parallel_threads(), reps);

  Vec fs, fp;
  const double t_fs = best_of(reps, [&] { fs = internal_force(span, d, Exec::Serial); });
  const double t_fp = best_of(reps, [&] { fp = internal_force(span, d, Exec::Parallel); });
  std::printf("  internal_force            serial %9.3f ms  parallel %9.3f ms  x%.2f  rel diff %.2e\n",
              1e3 * t_fs, 1e3 * t_fp, t_fs / t_fp, rel_diff(fs, fp));

  SpMat Ks, Kp;
  const double t_ks = best_of(reps, [&] { Ks = tangent_stiffness(span, d, Exec::Serial); });
  const double t_kp = best_of(reps, [&] { Kp = tangent_stiffness(span, d, Exec::Parallel); });
  const double knorm = Vec(Ks.coeffs()).norm();
  std::printf("  tangent_stiffness         serial %9.3f ms  parallel %9.3f ms  x%.2f  rel diff %.2e\n",
              1e3 * t_ks, 1e3 * t_kp, t_ks / t_kp,
              Vec(SpMat(Ks - Kp).coeffs()).norm() / std::max(knorm, 1e-300));

  Vec hs, hp;
  const double t_hs = best_of(reps, [&] { hs = tangent_derivative_apply(span, v, w, Exec::Serial); });
  const double t_hp = best_of(reps, [&] { hp = tangent_derivative_apply(span, v, w, Exec::Parallel); });
  std::printf("  tangent_derivative_apply  serial %9.3f ms  parallel %9.3f ms  x%.2f  rel diff %.2e\n",
              1e3 * t_hs, 1e3 * t_hp, t_hs / t_hp, rel_diff(hs, hp));

  // Manifold + projection: the construction-time hot path.
  const GlobalOperators ops = assemble_global(model);
  Partition part = partition_model(model, ops, {{model.node_nearest(0.06)}});
  const Substructure& sub = part.subs[0];
  const ModeSet fim = fixed_interface_modes(sub, 4);
  const Mat Psi = Mat::Identity(sub.n_q, sub.n_q);
  ManifoldOptions mo;
  mo.exec = Exec::Serial;
  Manifold man_s, man_p;
  const double t_ms = best_of(reps, [&] { man_s = build_manifold(sub, fim, Psi, mo); });
  mo.exec = Exec::Parallel;
  const double t_mp = best_of(reps, [&] { man_p = build_manifold(sub, fim, Psi, mo); });
  std::printf("  build_manifold            serial %9.3f ms  parallel %9.3f ms  x%.2f  rel diff %.2e\n",
              1e3 * t_ms, 1e3 * t_mp, t_ms / t_mp,
              (man_s.Q.data() - man_p.Q.data()).norm() / std::max(man_s.Q.data().norm(), 1e-300));

  SubstructureRom rs, rp;
  const double t_ps = best_of(reps, [&] { rs = project_substructure(sub, man_s, Exec::Serial); });
  const double t_pp = best_of(reps, [&] { rp = project_substructure(sub, man_s, Exec::Parallel); });
  std::printf("  project_substructure      serial %9.3f ms  parallel %9.3f ms  x%.2f  rel diff %.2e\n",
              1e3 * t_ps, 1e3 * t_pp, t_ps / t_pp,
              (rs.K3r.data() - rp.K3r.data()).norm() / std::max(rs.K3r.data().norm(), 1e-300));
}

void bench_integration(int n_elements, int steps, int threads) {
  Scenario sc;
  sc.name = "bench_flat";
  sc.n_elements = n_elements;
  sc.length = 0.1;
  sc.rise = 0.0;
  sc.section = {5e-3, 5e-4};
  sc.material = {210e9, 7800.0, 0.33};
  sc.rayleigh_alpha = 24.85;
  sc.rayleigh_beta = 3.15e-6;
  sc.cuts = {0.6};
  sc.n_fim = 1;
  sc.virtual_interface = true;
  sc.load.spatial = LoadSpec::Spatial::Pressure;
  sc.load.shape = LoadSpec::TimeShape::Sine;
  sc.load.amplitude = 20e3;
  sc.load.freq_is_f1 = true;
  sc.dt = 7.42e-5;
  sc.n_steps = steps;
  sc.probe_positions = {0.5};
  sc.compare_modes = 2;

  RunOptions opt;
  opt.variants = {Variant::Full, Variant::Nlcb};
  opt.threads = threads;
  const ScenarioArtifacts art = run_scenario(sc, opt);

  double t_full = 0.0, t_rom = 0.0;
  for (const auto& r : art.runs) {
    if (r.variant == Variant::Full) t_full = r.wall_s;
    if (r.variant == Variant::Nlcb) t_rom = r.wall_s;
  }
  std::printf("integration: %d free DoFs -> %d reduced, %d steps\n", art.model.n_free,
              art.rom.model.m, steps);
  std::printf("  full %9.3f s   rom %9.3f s   speedup x%.1f   (rom build %5.3f s)\n", t_full,
              t_rom, t_full / std::max(t_rom, 1e-12), art.rom_build_s);
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"nlcb kernel and integration benchmarks"};
  int elements = 400, reps = 5, steps = 200, threads = 0;
  bool skip_integration = false;
  app.add_option("--elements", elements, "Mesh size for the kernel benchmarks");
  app.add_option("--reps", reps, "Repetitions per kernel measurement");
  app.add_option("--steps", steps, "Time steps for the integration comparison");
  app.add_option("--threads", threads, "Parallel thread count (0 = library default)");
  app.add_flag("--skip-integration", skip_integration, "Kernel benchmarks only");
  CLI11_PARSE(app, argc, argv);

  try {
    bench_kernels(elements, reps, threads);
    if (!skip_integration) bench_integration(std::max(elements, 170), steps, threads);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
