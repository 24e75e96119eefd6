#pragma once

#include <vector>

#include "nlcb/kernels.hpp"
#include "nlcb/model.hpp"
#include "nlcb/types.hpp"

namespace nlcb {

/// One interface: the set of mesh nodes shared between two substructures.
struct Interface {
  std::vector<int> nodes;     // mesh node ids, ascending
  std::vector<int> free_dofs; // global free indices, (node, comp) order
  std::vector<int> subs;      // substructures touching it, ascending
};

/// A substructure in local numbering: internal DoFs first, then interface
/// DoFs in interface order. Local vectors are d = [u; q].
struct Substructure {
  std::vector<int> element_ids;
  std::vector<int> internal_dofs;  // global free indices
  std::vector<int> interface_dofs; // global free indices
  std::vector<int> interfaces;     // interface ids, ascending; q blocks follow this order
  int n_u = 0, n_q = 0;
  int n() const { return n_u + n_q; }
  ElementSpan span;   // elements scattered into local numbering
  SpMat M, K, D;      // local operators
  SpMat Kuu, Kuq, Muu, Muq, Kqq;
};

struct Partition {
  std::vector<Substructure> subs;
  std::vector<Interface> interfaces;
  std::vector<SpMat> L; // boolean localization, d(s) = L(s) d_glob
  std::vector<SpMat> B; // signed compatibility, sum_s B(s) L(s) = 0
};

/// Split a model along interface node sets. Every element must fall in exactly
/// one substructure; a non-interface node reached by elements of two
/// substructures is a separator violation and throws.
Partition partition_model(const BeamModel& model, const GlobalOperators& ops,
                          const std::vector<std::vector<int>>& interface_nodes);

/// Convenience: interfaces at the nodes nearest the given axial cut positions.
Partition partition_at(const BeamModel& model, const GlobalOperators& ops,
                       const std::vector<double>& cut_positions);

/// Primal assembly sum_s L(s)^T A(s) L(s).
SpMat primal_assemble(const std::vector<SpMat>& ops, const std::vector<SpMat>& L, int n_glob);

} // namespace nlcb
