#pragma once

#include "nlcb/tensor.hpp"
#include "nlcb/types.hpp"

namespace nlcb {

struct Material {
  double youngs_modulus = 0.0;
  double density = 0.0;
  double poisson_ratio = 0.0; // carried for parity with shell inputs; unused by the beam kernel
};

struct Section {
  double width = 0.0;
  double thickness = 0.0;
  double area() const { return width * thickness; }
  double inertia() const { return width * thickness * thickness * thickness / 12.0; }
};

/// Exact operators of the discrete von Karman beam strain energy
///   U = 1/2 int EA (u' + w0' w' + 1/2 w'^2)^2 + 1/2 int EI w''^2
/// on [0,L] with linear axial and cubic Hermite transverse shapes,
/// 2-point Gauss membrane / 3-point Gauss bending quadrature.
/// Element DoF order: (u1, w1, th1, u2, w2, th2).
/// The elastic force is f(d) = Ke d + K2e:(d (x) d) + K3e:(d (x) d (x) d),
/// with K2e and K3e symmetric under every axis permutation.
struct ElementTensors {
  Mat6 Ke = Mat6::Zero();
  Mat6 Me = Mat6::Zero();
  SymTensor3 K2e{6, 6};
  SymTensor4 K3e{6, 6};
};

/// length: element span along the beam axis projection; slope0: initial
/// elevation slope w0' at each membrane Gauss point.
ElementTensors element_operators(double length, const std::array<double, 2>& slope0,
                                 const Section& sec, const Material& mat);
/// Constant-slope convenience overload.
inline ElementTensors element_operators(double length, double slope0, const Section& sec,
                                        const Material& mat) {
  return element_operators(length, {slope0, slope0}, sec, mat);
}

/// Consistent nodal loads of a uniform transverse line load q [N/m].
Vec6 element_line_load(double length, double q);

/// Quadrature abscissae/weights shared by the element and its oracles; the
/// rule is part of the discrete energy definition.
struct GaussRule {
  std::array<double, 3> s;
  std::array<double, 3> w; // weights on the unit interval, sum 1
  int n;
};
GaussRule membrane_rule();
GaussRule bending_rule();

/// Shape-derivative rows at parametric s in [0,1]: u' = a.d, w' = b.d, w'' = e.d.
void shape_rows(double s, double length, Vec6& a, Vec6& b, Vec6& e);

} // namespace nlcb
