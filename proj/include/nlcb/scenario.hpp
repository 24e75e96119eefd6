#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nlcb/basis.hpp"
#include "nlcb/config.hpp"
#include "nlcb/manifold.hpp"
#include "nlcb/model.hpp"
#include "nlcb/newmark.hpp"
#include "nlcb/partition.hpp"
#include "nlcb/rom.hpp"
#include "nlcb/types.hpp"

namespace nlcb {

enum class Variant { Full, Linear, Nlcb, Cb };
std::string to_string(Variant v);
Variant variant_from_string(const std::string& s);
std::string ablation_suffix(QuadraticAblation a); // "", "_zero_quadratic", ...

struct LoadSpec {
  enum class Spatial { Pressure, Point };
  enum class TimeShape { Sine, Cosine, Constant, Table };
  Spatial spatial = Spatial::Pressure;
  TimeShape shape = TimeShape::Sine;
  double amplitude = 0.0; // Pa for pressure, N for point
  double position = 0.5;  // fraction of span, point loads
  int component = 1;      // 0 u, 1 w, 2 theta
  bool freq_is_f1 = false;
  double frequency = 0.0; // Hz, ignored when freq_is_f1
  std::vector<double> table_t, table_v;
};

/// A fully validated experiment description, one per scenario file.
struct Scenario {
  std::string name;
  int n_elements = 0;
  double length = 0.0, rise = 0.0;
  Section section;
  Material material;
  double rayleigh_alpha = 0.0, rayleigh_beta = 0.0;
  std::vector<double> cuts; // fractions of span
  int n_fim = 1;
  bool virtual_interface = true;
  QuadraticRhs rhs = QuadraticRhs::Exact;
  LoadSpec load;
  double dt = 0.0;
  double cycles = 0.0; // of the load frequency; used when n_steps == 0
  int n_steps = 0;
  double newton_tol = 1e-6;
  int max_iter = 20;
  std::vector<double> probe_positions; // fractions; u and w are probed at each
  int compare_modes = 2;
  std::vector<int> spectrum_modes; // 1-based global VM indices
  bool export_rom_file = false;
  bool dump_manifold_file = false;
};

/// Maps and validates a parsed config; unknown sections or keys are errors.
Scenario load_scenario(const Config& cfg);

struct RunOptions {
  std::vector<Variant> variants{Variant::Full, Variant::Linear, Variant::Nlcb};
  std::vector<QuadraticAblation> ablations; // extra NL-CB runs on ablated manifolds
  int threads = 0;                          // 0 = library default; 1 = serial kernels
  unsigned long seed = 0;                   // recorded in the manifest
  std::vector<std::pair<int, int>> extra_probes; // (node, component)
};

struct ProbeInfo {
  int node = 0, comp = 0, dof = 0;
  std::string name;
};

struct VariantResult {
  Variant variant = Variant::Nlcb;
  QuadraticAblation ablation = QuadraticAblation::None;
  std::string label;
  TimeHistory hist; // in the variant's own space
  Mat d;            // free-DoF displacement history, reconstructed for ROMs
  Vec kin, pot;     // energies per step in the variant's own space
  double wall_s = 0.0;
};

struct ScenarioArtifacts {
  Scenario sc;
  BeamModel model;
  GlobalOperators ops;
  Partition part;
  std::vector<int> iface_width;
  RomAssembly rom;                  // NL-CB, unablated
  std::optional<RomAssembly> cb;    // classic CB, built when requested
  ModeSet full_modes;
  Vec rom_frequencies;              // Hz, from the reduced linear pencil
  double f1 = 0.0;                  // full-model first frequency, Hz
  std::vector<ProbeInfo> probes;
  NewmarkConfig integration;        // resolved steps
  std::vector<VariantResult> runs;
  double rom_build_s = 0.0;
};

/// End-to-end run: build, reduce, integrate every requested variant.
ScenarioArtifacts run_scenario(const Scenario& sc, const RunOptions& opt);

/// Emit all artifacts (CSVs, metrics.json, manifest.json, optional ROM/
/// manifold dumps) into out_dir; config_echo is reproduced in the manifest.
void write_outputs(const ScenarioArtifacts& art, const RunOptions& opt,
                   const std::string& config_echo, const std::string& out_dir);

/// Plain FFT magnitude spectrum (one-sided, amplitude-scaled) of a uniformly
/// sampled series; skip drops leading samples.
struct Spectrum {
  Vec freq, amp;
};
Spectrum spectrum(const Vec& series, double dt, int skip = 0);

/// Largest amplitude within a relative band (at least +-1.5 bins) of f_target.
double spectrum_peak(const Spectrum& sp, double f_target, double rel_band = 0.02);

/// Modal amplitudes q(t) = Phi^T M d(t) of a displacement history.
Mat modal_amplitudes(const ModeSet& modes, const SpMat& M, const Mat& d_hist);

double rms_rel_error(const Vec& test, const Vec& ref);
double peak_rel_error(const Vec& test, const Vec& ref);

} // namespace nlcb
