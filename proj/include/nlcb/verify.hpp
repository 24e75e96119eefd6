#pragma once

#include <functional>
#include <vector>

#include "nlcb/basis.hpp"
#include "nlcb/model.hpp"
#include "nlcb/partition.hpp"
#include "nlcb/types.hpp"

// Brute-force oracles, deliberately independent of the tensor force kernels:
// forces come from direct quadrature of the strain measure, reductions from
// dense global tensors. Slow by design; never linked into the CLI.
namespace nlcb::verify {

/// Internal force of one element by Gauss quadrature of
///   U = 1/2 int EA (u' + w0' w' + 1/2 w'^2)^2 + 1/2 int EI w''^2,
/// with w0' given at the membrane Gauss points.
Vec6 quadrature_element_force(double length, const std::array<double, 2>& slope0,
                              const Section& sec, const Material& mat, const Vec6& d);
double quadrature_element_energy(double length, const std::array<double, 2>& slope0,
                                 const Section& sec, const Material& mat, const Vec6& d);
inline Vec6 quadrature_element_force(double length, double slope0, const Section& sec,
                                     const Material& mat, const Vec6& d) {
  return quadrature_element_force(length, {slope0, slope0}, sec, mat, d);
}
inline double quadrature_element_energy(double length, double slope0, const Section& sec,
                                        const Material& mat, const Vec6& d) {
  return quadrature_element_energy(length, {slope0, slope0}, sec, mat, d);
}

/// Assembled quadrature force / energy over the whole mesh.
Vec quadrature_force(const BeamModel& model, const Vec& d);
double quadrature_energy(const BeamModel& model, const Vec& d);

struct DenseTensor3 {
  int n = 0;
  std::vector<double> a; // (i n + j) n + k
  DenseTensor3() = default;
  explicit DenseTensor3(int n_) : n(n_), a(static_cast<size_t>(n_) * n_ * n_, 0.0) {}
  double& at(int i, int j, int k) { return a[(static_cast<size_t>(i) * n + j) * n + k]; }
  double at(int i, int j, int k) const { return a[(static_cast<size_t>(i) * n + j) * n + k]; }
  Vec contract2(const Vec& x, const Vec& y) const;
};

struct DenseTensor4 {
  int n = 0;
  std::vector<double> a;
  DenseTensor4() = default;
  explicit DenseTensor4(int n_) : n(n_), a(static_cast<size_t>(n_) * n_ * n_ * n_, 0.0) {}
  double& at(int i, int j, int k, int l) {
    return a[((static_cast<size_t>(i) * n + j) * n + k) * n + l];
  }
  double at(int i, int j, int k, int l) const {
    return a[((static_cast<size_t>(i) * n + j) * n + k) * n + l];
  }
  Vec contract3(const Vec& x, const Vec& y, const Vec& z) const;
};

struct GlobalTensors {
  DenseTensor3 K2;
  DenseTensor4 K3;
};

/// Dense global quadratic/cubic tensors scattered from the element tensors.
/// Refuses spans above 60 DoFs (O(n^4) memory).
GlobalTensors global_tensor_oracle(const ElementSpan& span);

/// Full nonlinear static condensation: the internal displacement u solving
/// the internal equilibrium with kept-mode content constrained to eta and the
/// interface at Psi chi; Newton on the mode-deflated residual. Reference for
/// the manifold's second-order accuracy.
Vec static_condensation_oracle(const Substructure& sub, const ModeSet& fim, const Mat& Psi,
                               const Vec& eta, const Vec& chi);

/// Least-squares slope of log err(eps) vs log eps; throws on nonpositive
/// samples (an exactly-zero error has no finite slope and is asserted apart).
double scaling_probe(const std::function<double(double)>& err, const std::vector<double>& eps);

} // namespace nlcb::verify
