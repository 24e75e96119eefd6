#pragma once

#include <array>
#include <vector>

#include "nlcb/element.hpp"
#include "nlcb/types.hpp"

namespace nlcb {

/// A set of elements scattered into a common DoF numbering (global free DoFs
/// or substructure-local DoFs). dofmap entries of -1 denote fixed DoFs: they
/// contribute zero displacement and receive no force.
struct ElementSpan {
  const std::vector<ElementTensors>* tensors = nullptr; // indexed by entries of ids
  std::vector<int> ids;
  std::vector<std::array<int, 6>> dofmap; // aligned with ids
  int ndof = 0;
};

/// Full elastic force f(d) = K d + K2:(d,d) + K3:(d,d,d), assembled per element.
Vec internal_force(const ElementSpan& span, const Vec& d, Exec exec = Exec::Serial);

/// Tangent stiffness K_t(d) = K + 2 K2.d + 3 K3:(d,d).
SpMat tangent_stiffness(const ElementSpan& span, const Vec& d, Exec exec = Exec::Serial);

/// Strain energy via the element tensors.
double strain_energy(const ElementSpan& span, const Vec& d);

/// Directional derivative of the tangent stiffness applied to a vector,
///   h(v, w) = d/de K_t(e v)|_0 . w = 2 sum_e Le^T K2e:(v_e (x) w_e),
/// evaluated exactly from the element quadratic tensors.
Vec tangent_derivative_apply(const ElementSpan& span, const Vec& v, const Vec& w,
                             Exec exec = Exec::Serial);

/// Central finite-difference variant of tangent_derivative_apply using two
/// tangent assemblies at +/- step * v.
Vec tangent_derivative_fd(const ElementSpan& span, const Vec& v, const Vec& w, double step);

} // namespace nlcb
