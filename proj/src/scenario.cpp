#include "nlcb/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <initializer_list>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>
#include <unsupported/Eigen/FFT>

namespace nlcb {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr const char* kVersion = "0.1.0";

double elapsed(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string file_stem(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

void check_keys(const Config& cfg, const std::string& section,
                std::initializer_list<const char*> allowed) {
  for (const std::string& k : cfg.keys(section)) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok)
      throw ConfigError(cfg.name() + ": unknown key '" + k + "' in [" + section + "]");
  }
}

int component_index(const Config& cfg, const std::string& s) {
  if (s == "u") return 0;
  if (s == "w") return 1;
  if (s == "theta") return 2;
  throw ConfigError(cfg.name() + ": load component must be u, w, or theta");
}

} // namespace

std::string to_string(Variant v) {
  switch (v) {
    case Variant::Full: return "full";
    case Variant::Linear: return "linear";
    case Variant::Nlcb: return "nlcb";
    case Variant::Cb: return "cb";
  }
  return "?";
}

Variant variant_from_string(const std::string& s) {
  if (s == "full") return Variant::Full;
  if (s == "linear") return Variant::Linear;
  if (s == "nlcb") return Variant::Nlcb;
  if (s == "cb") return Variant::Cb;
  throw std::invalid_argument("unknown variant '" + s + "' (expected full|linear|nlcb|cb)");
}

std::string ablation_suffix(QuadraticAblation a) {
  switch (a) {
    case QuadraticAblation::None: return "";
    case QuadraticAblation::All: return "_zero_quadratic";
    case QuadraticAblation::ChiOnly: return "_zero_quadratic_chi";
    case QuadraticAblation::CrossOnly: return "_zero_quadratic_cross";
  }
  return "?";
}

Scenario load_scenario(const Config& cfg) {
  for (const std::string& s : cfg.sections()) {
    static const char* known[] = {"geometry",  "material",    "damping", "partition",
                                  "reduction", "load",        "integration", "outputs"};
    if (std::find_if(std::begin(known), std::end(known),
                     [&](const char* k) { return s == k; }) == std::end(known))
      throw ConfigError(cfg.name() + ": unknown section [" + s + "]");
  }

  Scenario sc;
  sc.name = file_stem(cfg.name());

  check_keys(cfg, "geometry", {"elements", "length", "rise", "width", "thickness"});
  sc.n_elements = cfg.integer("geometry", "elements");
  sc.length = cfg.number("geometry", "length");
  sc.rise = cfg.number("geometry", "rise", 0.0);
  sc.section.width = cfg.number("geometry", "width");
  sc.section.thickness = cfg.number("geometry", "thickness");
  if (sc.n_elements < 2 || sc.length <= 0.0 || sc.rise < 0.0)
    throw ConfigError(cfg.name() + ": invalid [geometry]");

  check_keys(cfg, "material", {"youngs_modulus", "density", "poisson"});
  sc.material.youngs_modulus = cfg.number("material", "youngs_modulus");
  sc.material.density = cfg.number("material", "density");
  sc.material.poisson_ratio = cfg.number("material", "poisson", 0.3);

  check_keys(cfg, "damping", {"alpha", "beta"});
  sc.rayleigh_alpha = cfg.number("damping", "alpha", 0.0);
  sc.rayleigh_beta = cfg.number("damping", "beta", 0.0);

  check_keys(cfg, "partition", {"cuts"});
  sc.cuts = cfg.has("partition", "cuts") ? cfg.numbers("partition", "cuts")
                                         : std::vector<double>{0.6};
  if (sc.cuts.empty()) throw ConfigError(cfg.name() + ": [partition] cuts must not be empty");
  for (double c : sc.cuts)
    if (!(c > 0.0 && c < 1.0))
      throw ConfigError(cfg.name() + ": [partition] cuts must lie strictly inside (0, 1)");

  check_keys(cfg, "reduction", {"fixed_interface_modes", "interface", "rhs"});
  sc.n_fim = cfg.integer("reduction", "fixed_interface_modes", 1);
  if (sc.n_fim < 1)
    throw ConfigError(cfg.name() + ": fixed_interface_modes must be at least 1");
  const std::string iface = cfg.str("reduction", "interface", "virtual");
  if (iface != "virtual" && iface != "physical")
    throw ConfigError(cfg.name() + ": interface must be 'virtual' or 'physical'");
  sc.virtual_interface = iface == "virtual";
  const std::string rhs = cfg.str("reduction", "rhs", "exact");
  if (rhs != "exact" && rhs != "fd")
    throw ConfigError(cfg.name() + ": rhs must be 'exact' or 'fd'");
  sc.rhs = rhs == "exact" ? QuadraticRhs::Exact : QuadraticRhs::FiniteDifference;

  check_keys(cfg, "load",
             {"type", "amplitude", "time", "frequency", "position", "component", "table_t",
              "table_v"});
  const std::string ltype = cfg.str("load", "type");
  if (ltype == "pressure")
    sc.load.spatial = LoadSpec::Spatial::Pressure;
  else if (ltype == "point")
    sc.load.spatial = LoadSpec::Spatial::Point;
  else
    throw ConfigError(cfg.name() + ": load type must be 'pressure' or 'point'");
  sc.load.amplitude = cfg.number("load", "amplitude");
  const std::string tshape = cfg.str("load", "time", "sine");
  if (tshape == "sine")
    sc.load.shape = LoadSpec::TimeShape::Sine;
  else if (tshape == "cosine")
    sc.load.shape = LoadSpec::TimeShape::Cosine;
  else if (tshape == "constant")
    sc.load.shape = LoadSpec::TimeShape::Constant;
  else if (tshape == "table")
    sc.load.shape = LoadSpec::TimeShape::Table;
  else
    throw ConfigError(cfg.name() + ": load time must be sine, cosine, constant, or table");

  const bool periodic = sc.load.shape == LoadSpec::TimeShape::Sine ||
                        sc.load.shape == LoadSpec::TimeShape::Cosine;
  if (periodic) {
    if (!cfg.has("load", "frequency"))
      throw ConfigError(cfg.name() + ": periodic loads need a frequency");
    if (cfg.kind("load", "frequency") == Config::Value::Kind::String) {
      if (cfg.str("load", "frequency") != "f1")
        throw ConfigError(cfg.name() + ": frequency must be a number in Hz or \"f1\"");
      sc.load.freq_is_f1 = true;
    } else {
      sc.load.frequency = cfg.number("load", "frequency");
      if (!(sc.load.frequency > 0.0))
        throw ConfigError(cfg.name() + ": frequency must be positive");
    }
  }
  if (sc.load.spatial == LoadSpec::Spatial::Point) {
    sc.load.position = cfg.number("load", "position", 0.5);
    if (!(sc.load.position > 0.0 && sc.load.position < 1.0))
      throw ConfigError(cfg.name() + ": load position must lie strictly inside (0, 1)");
    sc.load.component = component_index(cfg, cfg.str("load", "component", "w"));
  }
  if (sc.load.shape == LoadSpec::TimeShape::Table) {
    sc.load.table_t = cfg.numbers("load", "table_t");
    sc.load.table_v = cfg.numbers("load", "table_v");
    if (sc.load.table_t.size() != sc.load.table_v.size() || sc.load.table_t.size() < 2)
      throw ConfigError(cfg.name() + ": table_t/table_v need equal lengths of at least 2");
    if (!std::is_sorted(sc.load.table_t.begin(), sc.load.table_t.end()))
      throw ConfigError(cfg.name() + ": table_t must be ascending");
    if (sc.load.table_t.front() > 0.0)
      throw ConfigError(cfg.name() + ": table_t must start at or before t = 0");
  }

  check_keys(cfg, "integration", {"dt", "cycles", "steps", "newton_tol", "max_iter"});
  sc.dt = cfg.number("integration", "dt");
  if (!(sc.dt > 0.0)) throw ConfigError(cfg.name() + ": dt must be positive");
  const bool has_cycles = cfg.has("integration", "cycles");
  const bool has_steps = cfg.has("integration", "steps");
  if (has_cycles == has_steps)
    throw ConfigError(cfg.name() + ": give exactly one of cycles or steps");
  if (has_steps) {
    sc.n_steps = cfg.integer("integration", "steps");
    if (sc.n_steps < 1) throw ConfigError(cfg.name() + ": steps must be at least 1");
  } else {
    sc.cycles = cfg.number("integration", "cycles");
    if (!(sc.cycles > 0.0)) throw ConfigError(cfg.name() + ": cycles must be positive");
    if (!periodic)
      throw ConfigError(cfg.name() + ": cycles needs a periodic load; give steps instead");
  }
  sc.newton_tol = cfg.number("integration", "newton_tol", 1e-6);
  sc.max_iter = cfg.integer("integration", "max_iter", 20);
  if (!(sc.newton_tol > 0.0) || sc.max_iter < 1)
    throw ConfigError(cfg.name() + ": invalid Newton settings");

  check_keys(cfg, "outputs",
             {"probes", "compare_modes", "spectrum_modes", "export_rom", "dump_manifold"});
  sc.probe_positions = cfg.has("outputs", "probes") ? cfg.numbers("outputs", "probes")
                                                    : std::vector<double>{0.25, 0.5, 0.6};
  for (double p : sc.probe_positions)
    if (!(p > 0.0 && p < 1.0))
      throw ConfigError(cfg.name() + ": probes must lie strictly inside (0, 1)");
  sc.compare_modes = cfg.integer("outputs", "compare_modes", 2);
  if (sc.compare_modes < 1) throw ConfigError(cfg.name() + ": compare_modes must be positive");
  if (cfg.has("outputs", "spectrum_modes")) {
    for (double v : cfg.numbers("outputs", "spectrum_modes")) {
      if (v != std::floor(v) || v < 1.0)
        throw ConfigError(cfg.name() + ": spectrum_modes must be positive integers");
      sc.spectrum_modes.push_back(static_cast<int>(v));
    }
  }
  sc.export_rom_file = cfg.boolean("outputs", "export_rom", false);
  sc.dump_manifold_file = cfg.boolean("outputs", "dump_manifold", false);
  return sc;
}

namespace {

// Time factor of the load; table values interpolate linearly and must cover
// the integration window.
std::function<double(double)> time_factor(const LoadSpec& load, double f_hz) {
  using TS = LoadSpec::TimeShape;
  switch (load.shape) {
    case TS::Sine:
      return [f_hz](double t) { return std::sin(2.0 * EIGEN_PI * f_hz * t); };
    case TS::Cosine:
      return [f_hz](double t) { return std::cos(2.0 * EIGEN_PI * f_hz * t); };
    case TS::Constant:
      return [](double) { return 1.0; };
    case TS::Table:
      return [tt = load.table_t, tv = load.table_v](double t) {
        if (t < tt.front() || t > tt.back())
          throw std::runtime_error("load table does not cover t = " + std::to_string(t));
        const auto hi = std::upper_bound(tt.begin(), tt.end(), t);
        if (hi == tt.end()) return tv.back();
        if (hi == tt.begin()) return tv.front();
        const size_t i = hi - tt.begin();
        const double s = (t - tt[i - 1]) / (tt[i] - tt[i - 1]);
        return tv[i - 1] + s * (tv[i] - tv[i - 1]);
      };
  }
  throw std::logic_error("time_factor: unreachable");
}

Mat block_diag(const std::vector<Mat>& blocks) {
  Eigen::Index rows = 0, cols = 0;
  for (const Mat& b : blocks) {
    rows += b.rows();
    cols += b.cols();
  }
  Mat out = Mat::Zero(rows, cols);
  Eigen::Index r = 0, c = 0;
  for (const Mat& b : blocks) {
    out.block(r, c, b.rows(), b.cols()) = b;
    r += b.rows();
    c += b.cols();
  }
  return out;
}

} // namespace

ScenarioArtifacts run_scenario(const Scenario& sc, const RunOptions& opt) {
  ScenarioArtifacts art;
  art.sc = sc;
  if (opt.threads > 0) set_parallel_threads(opt.threads);
  const Exec exec = opt.threads == 1 ? Exec::Serial : Exec::Parallel;

  art.model = make_beam(sc.n_elements, sc.length, sc.rise, sc.section, sc.material,
                        sc.rayleigh_alpha, sc.rayleigh_beta);
  art.ops = assemble_global(art.model);
  const ElementSpan gspan = model_span(art.model);

  int n_modes = std::max(sc.compare_modes, 1);
  for (int m : sc.spectrum_modes) n_modes = std::max(n_modes, m);
  art.full_modes = solve_modes(art.ops.K, art.ops.M, n_modes);
  art.f1 = art.full_modes.frequency()[0];

  // Load: fixed spatial shape scaled by a time factor.
  const Vec f_shape = sc.load.spatial == LoadSpec::Spatial::Pressure
                          ? pressure_load(art.model, sc.load.amplitude)
                          : Vec(sc.load.amplitude * point_load(art.model,
                                                               sc.load.position * sc.length,
                                                               sc.load.component));
  const double f_load = sc.load.freq_is_f1 ? art.f1 : sc.load.frequency;
  const auto g = time_factor(sc.load, f_load);

  art.integration.dt = sc.dt;
  art.integration.newton_tol = sc.newton_tol;
  art.integration.max_iter = sc.max_iter;
  art.integration.n_steps =
      sc.n_steps > 0 ? sc.n_steps
                     : static_cast<int>(std::llround(sc.cycles / (f_load * sc.dt)));

  for (double pos : sc.probe_positions) {
    const int node = art.model.node_nearest(pos * sc.length);
    for (int comp : {0, 1}) {
      ProbeInfo p;
      p.node = node;
      p.comp = comp;
      p.dof = art.model.free_dof(node, comp);
      if (p.dof < 0)
        throw std::invalid_argument("probe at fixed DoF (position " + std::to_string(pos) + ")");
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%s_x%.3f", comp == 0 ? "u" : "w", pos);
      p.name = buf;
      art.probes.push_back(p);
    }
  }
  for (const auto& [node, comp] : opt.extra_probes) {
    if (node < 0 || node >= static_cast<int>(art.model.nodes.size()) || comp < 0 || comp > 2)
      throw std::invalid_argument("probe node:dof out of range");
    ProbeInfo p;
    p.node = node;
    p.comp = comp;
    p.dof = art.model.free_dof(node, comp);
    if (p.dof < 0) throw std::invalid_argument("probe at fixed DoF (node " + std::to_string(node) + ")");
    const char* cname = comp == 0 ? "u" : comp == 1 ? "w" : "theta";
    p.name = std::string(cname) + "_n" + std::to_string(node);
    art.probes.push_back(p);
  }

  // Reduction pipeline: partition, interface bases, manifolds, projection.
  const auto t_rom = Clock::now();
  std::vector<double> cut_x;
  for (double c : sc.cuts) cut_x.push_back(c * sc.length);
  art.part = partition_at(art.model, art.ops, cut_x);

  std::vector<Mat> iface_psi(art.part.interfaces.size());
  art.iface_width.resize(art.part.interfaces.size());
  for (size_t i = 0; i < art.part.interfaces.size(); ++i) {
    if (sc.virtual_interface) {
      std::vector<Node> coords;
      for (int nid : art.part.interfaces[i].nodes) coords.push_back(art.model.nodes[nid]);
      iface_psi[i] = virtual_node_basis(coords);
    } else {
      const auto nq = art.part.interfaces[i].free_dofs.size();
      iface_psi[i] = Mat::Identity(nq, nq);
    }
    art.iface_width[i] = static_cast<int>(iface_psi[i].cols());
  }

  std::vector<ModeSet> fims(art.part.subs.size());
  std::vector<Mat> sub_psi(art.part.subs.size());
  std::vector<Manifold> manifolds(art.part.subs.size());
  std::vector<SubstructureRom> roms(art.part.subs.size());
  ManifoldOptions mopt;
  mopt.rhs = sc.rhs;
  mopt.fd_step = 1e-7 * sc.section.thickness;
  mopt.exec = exec;
  for (size_t s = 0; s < art.part.subs.size(); ++s) {
    const Substructure& sub = art.part.subs[s];
    fims[s] = fixed_interface_modes(sub, sc.n_fim);
    std::vector<Mat> blocks;
    for (int ifc : sub.interfaces) blocks.push_back(iface_psi[ifc]);
    sub_psi[s] = block_diag(blocks);
    if (sub_psi[s].rows() != sub.n_q)
      throw std::logic_error("run_scenario: interface basis rows mismatch");
    manifolds[s] = build_manifold(sub, fims[s], sub_psi[s], mopt);
    roms[s] = project_substructure(sub, manifolds[s], exec);
  }
  art.rom = assemble_rom(art.part, roms, manifolds, art.iface_width);
  art.rom_build_s = elapsed(t_rom);

  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> ges(art.rom.model.Kr, art.rom.model.Mr);
  if (ges.info() != Eigen::Success)
    throw std::runtime_error("run_scenario: reduced eigenproblem failed");
  art.rom_frequencies =
      ges.eigenvalues().cwiseMax(0.0).cwiseSqrt() / (2.0 * EIGEN_PI);

  const Vec x0_full = Vec::Zero(art.model.n_free);
  const auto full_load = [&f_shape, g](double t) { return Vec(f_shape * g(t)); };

  auto energies = [](const SecondOrderSystem& sys, const TimeHistory& h, Vec& kin, Vec& pot) {
    kin.resize(h.times.size());
    pot.resize(h.times.size());
    for (Eigen::Index k = 0; k < h.times.size(); ++k) {
      kin[k] = sys.kinetic(h.v.col(k));
      pot[k] = sys.potential(h.x.col(k));
    }
  };

  auto run_reduced = [&](const RomAssembly& asmb, VariantResult& r) {
    const Vec fr_shape = asmb.reduce_load(split_load(art.part, f_shape));
    RomSystem sys(asmb.model, [fr_shape, g](double t) { return Vec(fr_shape * g(t)); });
    const Vec xi0 = Vec::Zero(asmb.model.m);
    const auto t0 = Clock::now();
    r.hist = integrate(sys, xi0, xi0, art.integration);
    r.wall_s = elapsed(t0);
    r.d.resize(art.model.n_free, r.hist.x.cols());
    for (Eigen::Index k = 0; k < r.hist.x.cols(); ++k)
      r.d.col(k) = reconstruct(asmb, art.part, r.hist.x.col(k), art.model.n_free);
    energies(sys, r.hist, r.kin, r.pot);
  };

  auto run_one = [&](Variant v, QuadraticAblation ab) {
    VariantResult r;
    r.variant = v;
    r.ablation = ab;
    r.label = to_string(v) + ablation_suffix(ab);
    if (v == Variant::Full || v == Variant::Linear) {
      FullSystem sys(gspan, art.ops.M, art.ops.D, full_load, v == Variant::Linear, exec);
      const auto t0 = Clock::now();
      r.hist = integrate(sys, x0_full, x0_full, art.integration);
      r.wall_s = elapsed(t0);
      r.d = r.hist.x;
      energies(sys, r.hist, r.kin, r.pot);
    } else if (v == Variant::Cb) {
      if (!art.cb) {
        std::vector<SubstructureRom> cb_roms(art.part.subs.size());
        std::vector<Manifold> cb_mans(art.part.subs.size());
        for (size_t s = 0; s < art.part.subs.size(); ++s) {
          cb_roms[s] = classic_cb_rom(art.part.subs[s], fims[s], sub_psi[s]);
          cb_mans[s].L = cb_basis(art.part.subs[s], fims[s], sub_psi[s]);
          cb_mans[s].Q = SymTensor3(art.part.subs[s].n(), cb_roms[s].m());
          cb_mans[s].n_phi = cb_roms[s].n_phi;
          cb_mans[s].n_chi = cb_roms[s].n_chi;
        }
        art.cb = assemble_rom(art.part, cb_roms, cb_mans, art.iface_width);
      }
      run_reduced(*art.cb, r);
    } else {
      if (ab == QuadraticAblation::None) {
        run_reduced(art.rom, r);
      } else {
        std::vector<Manifold> mans(art.part.subs.size());
        std::vector<SubstructureRom> rs(art.part.subs.size());
        for (size_t s = 0; s < art.part.subs.size(); ++s) {
          mans[s] = ablate(art.rom.manifolds[s], ab);
          rs[s] = project_substructure(art.part.subs[s], mans[s], exec);
        }
        const RomAssembly asmb = assemble_rom(art.part, rs, mans, art.iface_width);
        run_reduced(asmb, r);
      }
    }
    art.runs.push_back(std::move(r));
  };

  for (Variant v : opt.variants) run_one(v, QuadraticAblation::None);
  for (QuadraticAblation ab : opt.ablations) run_one(Variant::Nlcb, ab);
  return art;
}

Spectrum spectrum(const Vec& series, double dt, int skip) {
  if (!(dt > 0.0)) throw std::invalid_argument("spectrum: dt must be positive");
  if (skip < 0 || series.size() - skip < 2)
    throw std::invalid_argument("spectrum: series too short");
  const int n = static_cast<int>(series.size()) - skip;
  std::vector<double> x(series.data() + skip, series.data() + series.size());
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> X;
  fft.fwd(X, x);
  const int nb = n / 2 + 1;
  Spectrum sp;
  sp.freq.resize(nb);
  sp.amp.resize(nb);
  for (int k = 0; k < nb; ++k) {
    sp.freq[k] = k / (n * dt);
    const double mag = std::abs(X[k]) / n;
    const bool oneside = k > 0 && !(n % 2 == 0 && k == n / 2);
    sp.amp[k] = oneside ? 2.0 * mag : mag;
  }
  return sp;
}

double spectrum_peak(const Spectrum& sp, double f_target, double rel_band) {
  if (sp.freq.size() < 2) throw std::invalid_argument("spectrum_peak: empty spectrum");
  const double df = sp.freq[1] - sp.freq[0];
  const double band = std::max(rel_band * f_target, 1.5 * df);
  double peak = 0.0;
  for (Eigen::Index k = 0; k < sp.freq.size(); ++k)
    if (std::abs(sp.freq[k] - f_target) <= band) peak = std::max(peak, sp.amp[k]);
  return peak;
}

Mat modal_amplitudes(const ModeSet& modes, const SpMat& M, const Mat& d_hist) {
  return modes.shapes.transpose() * (M * d_hist);
}

double rms_rel_error(const Vec& test, const Vec& ref) {
  if (test.size() != ref.size()) throw std::invalid_argument("rms_rel_error: size mismatch");
  const double den = ref.norm();
  const double num = (test - ref).norm();
  if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return num / den;
}

double peak_rel_error(const Vec& test, const Vec& ref) {
  if (test.size() != ref.size()) throw std::invalid_argument("peak_rel_error: size mismatch");
  const double den = ref.cwiseAbs().maxCoeff();
  const double num = (test - ref).cwiseAbs().maxCoeff();
  if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return num / den;
}

namespace {

class CsvWriter {
public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw std::runtime_error("cannot open " + path);
    for (size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << "\n";
  }
  void row(const std::vector<double>& values) {
    for (size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << fmt(values[i]);
    out_ << "\n";
  }
  void row_mixed(int lead, const std::vector<double>& values) {
    out_ << lead;
    for (double v : values) out_ << "," << fmt(v);
    out_ << "\n";
  }

private:
  std::ofstream out_;
};

} // namespace

void write_outputs(const ScenarioArtifacts& art, const RunOptions& opt,
                   const std::string& config_echo, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const auto path = [&](const std::string& f) { return (fs::path(out_dir) / f).string(); };

  {
    CsvWriter csv(path("modal_comparison.csv"), {"mode", "full_hz", "rom_hz", "rel_err_pct"});
    const Vec full_hz = art.full_modes.frequency();
    for (int i = 0; i < art.sc.compare_modes; ++i)
      csv.row_mixed(i + 1, {full_hz[i], art.rom_frequencies[i],
                            100.0 * std::abs(art.rom_frequencies[i] - full_hz[i]) / full_hz[i]});
  }

  for (const VariantResult& r : art.runs) {
    {
      std::vector<std::string> header{"t"};
      for (const ProbeInfo& p : art.probes) header.push_back(p.name);
      header.insert(header.end(), {"kinetic", "potential", "newton_iters"});
      CsvWriter csv(path("history_" + r.label + ".csv"), header);
      for (Eigen::Index k = 0; k < r.hist.times.size(); ++k) {
        std::vector<double> row{r.hist.times[k]};
        for (const ProbeInfo& p : art.probes) row.push_back(r.d(p.dof, k));
        row.push_back(r.kin[k]);
        row.push_back(r.pot[k]);
        row.push_back(k == 0 ? 0.0 : static_cast<double>(r.hist.iters[k - 1]));
        csv.row(row);
      }
    }
    {
      CsvWriter csv(path("energy_" + r.label + ".csv"),
                    {"t", "delta_kinetic", "w_internal", "w_damping", "w_external", "balance",
                     "balance_rel"});
      const EnergyAudit& au = r.hist.audit;
      for (size_t k = 0; k < au.t.size(); ++k)
        csv.row({au.t[k], au.dT[k], au.w_int[k], au.w_damp[k], au.w_ext[k], au.balance[k],
                 au.rel[k]});
    }
    if (!art.sc.spectrum_modes.empty()) {
      const Mat amps = modal_amplitudes(art.full_modes, art.ops.M, r.d);
      std::vector<Spectrum> sps;
      for (int m : art.sc.spectrum_modes)
        sps.push_back(spectrum(amps.row(m - 1).transpose(), art.integration.dt));
      std::vector<std::string> header{"freq_hz"};
      for (int m : art.sc.spectrum_modes) header.push_back("mode" + std::to_string(m));
      CsvWriter csv(path("spectrum_" + r.label + ".csv"), header);
      for (Eigen::Index k = 0; k < sps.front().freq.size(); ++k) {
        std::vector<double> row{sps.front().freq[k]};
        for (const Spectrum& sp : sps) row.push_back(sp.amp[k]);
        csv.row(row);
      }
    }
  }

  const VariantResult* full = nullptr;
  for (const VariantResult& r : art.runs)
    if (r.variant == Variant::Full) full = &r;

  {
    json metrics = json::array();
    for (const VariantResult& r : art.runs) {
      for (const ProbeInfo& p : art.probes) {
        json row{{"variant", r.label},
                 {"probe", p.name},
                 {"wall_clock_s", r.wall_s},
                 {"rms_rel_err", nullptr},
                 {"peak_rel_err", nullptr}};
        if (full) {
          const Vec test = r.d.row(p.dof).transpose();
          const Vec ref = full->d.row(p.dof).transpose();
          row["rms_rel_err"] = rms_rel_error(test, ref);
          row["peak_rel_err"] = peak_rel_error(test, ref);
        }
        metrics.push_back(row);
      }
    }
    std::ofstream out(path("metrics.json"));
    out << metrics.dump(2) << "\n";
  }

  {
    json manifest;
    manifest["scenario"] = art.sc.name;
    manifest["config"] = config_echo;
    manifest["library_version"] = kVersion;
    manifest["eigen_version"] = std::to_string(EIGEN_WORLD_VERSION) + "." +
                                std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                std::to_string(EIGEN_MINOR_VERSION);
    manifest["threads_requested"] = opt.threads;
    manifest["threads_effective"] = opt.threads == 1 ? 1 : parallel_threads();
    manifest["seed"] = opt.seed;
    manifest["n_free_dofs"] = art.model.n_free;
    manifest["n_reduced_dofs"] = art.rom.model.m;
    manifest["f1_hz"] = art.f1;
    manifest["n_steps"] = art.integration.n_steps;
    manifest["dt"] = art.integration.dt;
    json labels = json::array();
    json integration_s = json::object();
    for (const VariantResult& r : art.runs) {
      labels.push_back(r.label);
      integration_s[r.label] = r.wall_s;
    }
    manifest["variants"] = labels;
    manifest["timings"] = {{"rom_construction_s", art.rom_build_s},
                           {"integration_s", integration_s}};
    std::ofstream out(path("manifest.json"));
    out << manifest.dump(2) << "\n";
  }

  if (art.sc.export_rom_file) export_rom(art.rom, path("rom.json"));
  if (art.sc.dump_manifold_file)
    for (size_t s = 0; s < art.rom.manifolds.size(); ++s)
      dump_manifold(art.rom.manifolds[s], path("manifold_" + std::to_string(s) + ".bin"));
}

} // namespace nlcb
