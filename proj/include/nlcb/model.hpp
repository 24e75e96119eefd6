#pragma once

#include <array>
#include <string>
#include <vector>

#include "nlcb/element.hpp"
#include "nlcb/kernels.hpp"
#include "nlcb/types.hpp"

namespace nlcb {

struct Node {
  double x = 0.0;
  double z = 0.0;
  double slope0 = 0.0; // initial elevation slope w0'(x); the membrane strain
                       // sees the geometry only through this field
};

struct BeamElementRef {
  int n1 = -1;
  int n2 = -1;
};

/// Planar beam mesh with 3 DoFs per node (u, w, theta), fixed-DoF boundary
/// conditions and Rayleigh damping D = alpha M + beta K.
struct BeamModel {
  std::vector<Node> nodes;
  std::vector<BeamElementRef> elements;
  Section section;
  Material material;
  double rayleigh_alpha = 0.0;
  double rayleigh_beta = 0.0;
  std::vector<int> fixed_dofs; // global DoF ids, node*3 + {0:u,1:w,2:theta}

  // derived on finalize()
  int n_free = 0;
  std::vector<int> free_index;                // global DoF -> free index, -1 fixed
  std::vector<ElementTensors> element_tensors;
  std::vector<std::array<int, 6>> element_dofs; // free indices, -1 fixed
  std::vector<double> element_length;
  std::vector<std::array<double, 2>> element_slope0; // w0' at the membrane Gauss points

  int dof_count() const { return 3 * static_cast<int>(nodes.size()); }
  void finalize(); // validates and builds derived data; throws on bad input
  int node_nearest(double x) const;
  /// free index of (node, comp); -1 if fixed
  int free_dof(int node, int comp) const;
};

/// Clamped-clamped beam of given span; rise > 0 lifts the midspan on a
/// circular arc through the supports.
BeamModel make_beam(int n_elements, double length, double rise, const Section& sec,
                    const Material& mat, double alpha, double beta);

struct GlobalOperators {
  SpMat M, K, D;
  bool stiffness_spd = true; // false when K has a rigid-body null space; reported, not fatal
};

GlobalOperators assemble_global(const BeamModel& model);

/// Element span over the whole mesh in global free numbering.
ElementSpan model_span(const BeamModel& model);

/// Consistent load vector (free DoFs) of a uniform transverse pressure p [Pa]
/// acting on the section width.
Vec pressure_load(const BeamModel& model, double p);

/// Unit point load at the node nearest x, on DoF component comp.
Vec point_load(const BeamModel& model, double x, int comp);

} // namespace nlcb
