#pragma once

#include <string>
#include <vector>

#include "nlcb/manifold.hpp"
#include "nlcb/partition.hpp"
#include "nlcb/tensor.hpp"
#include "nlcb/types.hpp"

namespace nlcb {

/// Reduced operators of one substructure on its manifold: linear terms are
/// Galerkin projections on the manifold's linear part; K2r and K3r are the
/// quadratic/cubic tensors of the cubic-truncated reduced force, the cubic one
/// carrying the pure Galerkin cubic plus the quadratic-manifold cross terms.
/// Trailing indices are symmetrized in storage, so the Jacobian permutation
/// sums collapse to scalar multiples of the stored tensors.
struct SubstructureRom {
  Mat Mr, Dr, Kr;
  SymTensor3 K2r; // empty for linear ROMs
  SymTensor4 K3r;
  int n_phi = 0, n_chi = 0;
  int m() const { return n_phi + n_chi; }
  bool nonlinear() const { return !K2r.empty(); }
};

/// Element-level projection of the substructure operators onto the manifold.
SubstructureRom project_substructure(const Substructure& sub, const Manifold& man,
                                     Exec exec = Exec::Serial);

/// Classic Craig-Bampton basis [Phi, S Psi; 0, Psi] in local coordinates.
Mat cb_basis(const Substructure& sub, const ModeSet& fim, const Mat& Psi);

/// Classic Craig-Bampton reduction on cb_basis: linear operators only.
SubstructureRom classic_cb_rom(const Substructure& sub, const ModeSet& fim, const Mat& Psi);

/// Assembled reduced model. Global coordinates: every substructure's modal
/// amplitudes in substructure order, then one amplitude block per interface;
/// sharing the interface block enforces compatibility.
struct ReducedModel {
  Mat Mr, Dr, Kr;
  SymTensor3 K2r;
  SymTensor4 K3r;
  int m = 0;
  bool nonlinear = false;
  std::vector<std::vector<int>> map; // per substructure: local xi index -> global

  Vec force(const Vec& xi) const;         // K xi + K2:(xi,xi) + K3:(xi,xi,xi)
  Mat jacobian(const Vec& xi) const;      // K + 2 K2.xi + 3 K3:(xi,xi)
  double potential(const Vec& xi) const;  // 1/2 xi.K.xi + 1/3 xi.K2:(xi,xi) + 1/4 xi.K3:(xi,xi,xi)
  double kinetic(const Vec& xidot) const; // 1/2 xidot.M.xidot
  Vec localize(const Vec& xi, int s) const;
};

struct RomAssembly {
  ReducedModel model;
  std::vector<Manifold> manifolds; // per substructure, for loads and reconstruction
  std::vector<SubstructureRom> sub_roms;
  std::vector<int> iface_width;

  /// Reduced load sum_s Lr(s)^T L_Gamma(s)^T f(s) of per-substructure loads.
  Vec reduce_load(const std::vector<Vec>& sub_loads) const;
};

/// Localize a global load so the pieces partition it: interface entries are
/// split evenly between owners. Feeding the result to reduce_load gives the
/// reduced image of the global load.
std::vector<Vec> split_load(const Partition& part, const Vec& f_glob);

/// Primal assembly of substructure ROMs over shared interface amplitude
/// blocks; iface_width gives each interface's chi block width and must match
/// the substructures' chi partitions.
RomAssembly assemble_rom(const Partition& part, std::vector<SubstructureRom> roms,
                         std::vector<Manifold> manifolds, std::vector<int> iface_width);

/// Physical reconstruction d_glob(xi) through each substructure manifold;
/// interface rows are written by every owner and agree by construction.
Vec reconstruct(const RomAssembly& rom, const Partition& part, const Vec& xi, int n_glob);

/// Ablations: zero parts of Q before projection. ChiOnly: interface-pair
/// terms; CrossOnly: modal-interface coupling terms; All: whole quadratic part.
enum class QuadraticAblation { None, All, ChiOnly, CrossOnly };
Manifold ablate(const Manifold& man, QuadraticAblation what);

/// JSON round-trip of an assembled ROM (dims + flat arrays), exact to the
/// last bit, for reuse across runs and single-substructure refresh workflows.
void export_rom(const RomAssembly& rom, const std::string& path);
RomAssembly import_rom(const std::string& path);

} // namespace nlcb
