#pragma once

// Shared fixtures: the two reference beams and the full reduction pipeline
// in one call, so tests can pick apart any intermediate product.

#include <stdexcept>
#include <vector>

#include "nlcb/basis.hpp"
#include "nlcb/manifold.hpp"
#include "nlcb/model.hpp"
#include "nlcb/partition.hpp"
#include "nlcb/rom.hpp"
#include "nlcb/types.hpp"

namespace fix {

using namespace nlcb;

inline Section steel_section() { return Section{5e-3, 5e-4}; }
inline Material steel() { return Material{210e9, 7800.0, 0.33}; }

inline BeamModel flat_beam(int n_elements, double alpha = 24.85, double beta = 3.15e-6) {
  return make_beam(n_elements, 0.1, 0.0, steel_section(), steel(), alpha, beta);
}

inline BeamModel curved_beam(int n_elements, double alpha = 58.46, double beta = 1.58e-6) {
  return make_beam(n_elements, 0.1, 5e-3, steel_section(), steel(), alpha, beta);
}

inline Mat block_diag(const std::vector<Mat>& blocks) {
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

struct Reduced {
  BeamModel model;
  GlobalOperators ops;
  Partition part;
  std::vector<ModeSet> fims;
  std::vector<Mat> sub_psi;
  std::vector<Manifold> manifolds;
  std::vector<SubstructureRom> roms;
  std::vector<int> iface_width;
  RomAssembly rom;
};

/// Full pipeline on an already-built model: partition at the given span
/// fractions, n_fim kept modes per substructure, virtual or physical
/// interface coordinates, manifold + projection + assembly.
inline Reduced reduce(BeamModel model, const std::vector<double>& cut_fractions, int n_fim,
                      bool virtual_iface = true, QuadraticRhs rhs = QuadraticRhs::Exact) {
  Reduced r;
  r.model = std::move(model);
  r.ops = assemble_global(r.model);

  double span_length = 0.0;
  for (const Node& nd : r.model.nodes) span_length = std::max(span_length, nd.x);
  std::vector<double> cuts;
  for (double c : cut_fractions) cuts.push_back(c * span_length);
  r.part = partition_at(r.model, r.ops, cuts);

  std::vector<Mat> iface_psi(r.part.interfaces.size());
  r.iface_width.resize(r.part.interfaces.size());
  for (size_t i = 0; i < r.part.interfaces.size(); ++i) {
    if (virtual_iface) {
      std::vector<Node> coords;
      for (int nid : r.part.interfaces[i].nodes) coords.push_back(r.model.nodes[nid]);
      iface_psi[i] = virtual_node_basis(coords);
    } else {
      const auto nq = r.part.interfaces[i].free_dofs.size();
      iface_psi[i] = Mat::Identity(nq, nq);
    }
    r.iface_width[i] = static_cast<int>(iface_psi[i].cols());
  }

  r.fims.resize(r.part.subs.size());
  r.sub_psi.resize(r.part.subs.size());
  r.manifolds.resize(r.part.subs.size());
  r.roms.resize(r.part.subs.size());
  ManifoldOptions mopt;
  mopt.rhs = rhs;
  mopt.fd_step = 1e-7 * r.model.section.thickness;
  for (size_t s = 0; s < r.part.subs.size(); ++s) {
    const Substructure& sub = r.part.subs[s];
    r.fims[s] = fixed_interface_modes(sub, n_fim);
    std::vector<Mat> blocks;
    for (int ifc : sub.interfaces) blocks.push_back(iface_psi[ifc]);
    r.sub_psi[s] = block_diag(blocks);
    if (r.sub_psi[s].rows() != sub.n_q)
      throw std::logic_error("fixture: interface basis rows mismatch");
    r.manifolds[s] = build_manifold(sub, r.fims[s], r.sub_psi[s], mopt);
    r.roms[s] = project_substructure(sub, r.manifolds[s]);
  }
  r.rom = assemble_rom(r.part, r.roms, r.manifolds, r.iface_width);
  return r;
}

/// Deterministic pseudo-random vector in [-1, 1], xorshift-based so every
/// platform sees the same values.
inline Vec test_vector(int n, unsigned seed) {
  Vec v(n);
  unsigned long long s = 0x9e3779b97f4a7c15ULL + seed;
  for (int i = 0; i < n; ++i) {
    s ^= s << 13;
    s ^= s >> 7;
    s ^= s << 17;
    v[i] = 2.0 * (static_cast<double>(s % 1000000ULL) / 999999.0) - 1.0;
  }
  return v;
}

} // namespace fix
