#pragma once

#include <vector>

#include "nlcb/partition.hpp"
#include "nlcb/types.hpp"

namespace nlcb {

/// Mass-normalized solutions of K x = om^2 M x, ascending; the sign of each
/// mode is fixed so its largest-magnitude entry is positive.
struct ModeSet {
  Mat shapes;     // n x k
  Vec omega;      // rad/s
  Vec frequency() const { return omega / (2.0 * EIGEN_PI); }
};

/// Lowest n_modes of the symmetric pencil (K, M). Dense solver up to
/// dense_limit rows, shift-invert subspace iteration above.
ModeSet solve_modes(const SpMat& K, const SpMat& M, int n_modes, int dense_limit = 2000);

/// Fixed-interface modes of a substructure: modes of (Kuu, Muu).
ModeSet fixed_interface_modes(const Substructure& sub, int n_modes);

/// Static (constraint) modes S = -Kuu^{-1} Kuq, one column per interface DoF.
Mat static_modes(const SpMat& Kuu, const SpMat& Kuq);

/// Virtual-node interface reduction: orthonormal rigid x/z translations and
/// the rotation about the interface centroid, on (u, w, theta) nodal DoFs.
/// Falls back to identity column count when the interface has <= 1 node.
Mat virtual_node_basis(const std::vector<Node>& iface_nodes);

/// Principal angles (radians, ascending) between the column spans of A and B,
/// sine-based so angles near zero keep full precision.
Vec principal_angles(const Mat& A, const Mat& B);

} // namespace nlcb
