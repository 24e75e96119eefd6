#include "nlcb/verify.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/LU>
#include <Eigen/SparseCholesky>

#include "nlcb/element.hpp"
#include "nlcb/kernels.hpp"

namespace nlcb::verify {

Vec6 quadrature_element_force(double length, const std::array<double, 2>& slope0,
                              const Section& sec, const Material& mat, const Vec6& d) {
  const double EA = mat.youngs_modulus * sec.area();
  const double EI = mat.youngs_modulus * sec.inertia();
  Vec6 f = Vec6::Zero();
  Vec6 a, b, e;

  const GaussRule gm = membrane_rule();
  for (int g = 0; g < gm.n; ++g) {
    shape_rows(gm.s[g], length, a, b, e);
    const double wp = b.dot(d);
    const double eps = a.dot(d) + slope0[g] * wp + 0.5 * wp * wp;
    // dU/dd = EA eps (a + w0' b + w' b), straight from the strain measure
    f += (gm.w[g] * length * EA * eps) * (a + (slope0[g] + wp) * b);
  }
  const GaussRule gb = bending_rule();
  for (int g = 0; g < gb.n; ++g) {
    shape_rows(gb.s[g], length, a, b, e);
    f += (gb.w[g] * length * EI * e.dot(d)) * e;
  }
  return f;
}

double quadrature_element_energy(double length, const std::array<double, 2>& slope0,
                                 const Section& sec, const Material& mat, const Vec6& d) {
  const double EA = mat.youngs_modulus * sec.area();
  const double EI = mat.youngs_modulus * sec.inertia();
  double u = 0.0;
  Vec6 a, b, e;

  const GaussRule gm = membrane_rule();
  for (int g = 0; g < gm.n; ++g) {
    shape_rows(gm.s[g], length, a, b, e);
    const double wp = b.dot(d);
    const double eps = a.dot(d) + slope0[g] * wp + 0.5 * wp * wp;
    u += 0.5 * gm.w[g] * length * EA * eps * eps;
  }
  const GaussRule gb = bending_rule();
  for (int g = 0; g < gb.n; ++g) {
    shape_rows(gb.s[g], length, a, b, e);
    const double k = e.dot(d);
    u += 0.5 * gb.w[g] * length * EI * k * k;
  }
  return u;
}

Vec quadrature_force(const BeamModel& model, const Vec& d) {
  if (d.size() != model.n_free) throw std::invalid_argument("quadrature_force: size mismatch");
  Vec f = Vec::Zero(model.n_free);
  const int ne = static_cast<int>(model.elements.size());
  for (int e = 0; e < ne; ++e) {
    const auto& dofs = model.element_dofs[e];
    Vec6 de = Vec6::Zero();
    for (int i = 0; i < 6; ++i)
      if (dofs[i] >= 0) de[i] = d[dofs[i]];
    const Vec6 fe = quadrature_element_force(model.element_length[e], model.element_slope0[e],
                                             model.section, model.material, de);
    for (int i = 0; i < 6; ++i)
      if (dofs[i] >= 0) f[dofs[i]] += fe[i];
  }
  return f;
}

double quadrature_energy(const BeamModel& model, const Vec& d) {
  if (d.size() != model.n_free) throw std::invalid_argument("quadrature_energy: size mismatch");
  double u = 0.0;
  const int ne = static_cast<int>(model.elements.size());
  for (int e = 0; e < ne; ++e) {
    const auto& dofs = model.element_dofs[e];
    Vec6 de = Vec6::Zero();
    for (int i = 0; i < 6; ++i)
      if (dofs[i] >= 0) de[i] = d[dofs[i]];
    u += quadrature_element_energy(model.element_length[e], model.element_slope0[e],
                                   model.section, model.material, de);
  }
  return u;
}

Vec DenseTensor3::contract2(const Vec& x, const Vec& y) const {
  Vec f = Vec::Zero(n);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) s += at(i, j, k) * x[j] * y[k];
    f[i] = s;
  }
  return f;
}

Vec DenseTensor4::contract3(const Vec& x, const Vec& y, const Vec& z) const {
  Vec f = Vec::Zero(n);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) s += at(i, j, k, l) * x[j] * y[k] * z[l];
    f[i] = s;
  }
  return f;
}

GlobalTensors global_tensor_oracle(const ElementSpan& span) {
  if (span.ndof > 60)
    throw std::invalid_argument("global_tensor_oracle: span too large (cap 60 DoFs)");
  GlobalTensors out{DenseTensor3(span.ndof), DenseTensor4(span.ndof)};
  for (size_t e = 0; e < span.ids.size(); ++e) {
    const ElementTensors& et = (*span.tensors)[span.ids[e]];
    const auto& dofs = span.dofmap[e];
    for (int i = 0; i < 6; ++i) {
      if (dofs[i] < 0) continue;
      for (int j = 0; j < 6; ++j) {
        if (dofs[j] < 0) continue;
        for (int k = 0; k < 6; ++k) {
          if (dofs[k] < 0) continue;
          out.K2.at(dofs[i], dofs[j], dofs[k]) += et.K2e(i, j, k);
          for (int l = 0; l < 6; ++l)
            if (dofs[l] >= 0) out.K3.at(dofs[i], dofs[j], dofs[k], dofs[l]) += et.K3e(i, j, k, l);
        }
      }
    }
  }
  return out;
}

Vec static_condensation_oracle(const Substructure& sub, const ModeSet& fim, const Mat& Psi,
                               const Vec& eta, const Vec& chi) {
  const int nu = sub.n_u;
  if (fim.shapes.rows() != nu) throw std::invalid_argument("condensation: mode size mismatch");
  if (Psi.rows() != sub.n_q || Psi.cols() != chi.size())
    throw std::invalid_argument("condensation: interface basis size mismatch");
  const Mat& Phi = fim.shapes;
  const Vec q = Psi * chi;

  auto deflate = [&](const Vec& x) -> Vec { return x - Phi * (Phi.transpose() * (sub.Muu * x)); };

  Vec v = deflate(static_modes(sub.Kuu, sub.Kuq) * q);
  Vec d = Vec::Zero(sub.n());
  d.tail(sub.n_q) = q;

  // Newton on the bordered KKT system: equilibrium in the deflated complement
  // with multipliers carrying the FIM directions. Exact Jacobian, quadratic
  // convergence; dense is fine at oracle scale.
  const int np = static_cast<int>(Phi.cols());
  const Mat MPhi = sub.Muu * Phi;
  double ref = -1.0, best = -1.0;
  int stalled = 0;
  for (int it = 0; it < 50; ++it) {
    d.head(nu) = Phi * eta + v;
    const Vec g = internal_force(sub.span, d).head(nu);
    const Vec r = g - MPhi * (Phi.transpose() * g);
    const double rn = r.norm();
    if (ref < 0.0) {
      if (rn == 0.0) return d.head(nu); // zero input or already in equilibrium
      ref = rn;
    }
    if (rn <= 1e-12 * ref) return d.head(nu);
    if (best >= 0.0 && rn > 0.5 * best) {
      if (++stalled >= 3 && best <= 1e-9 * ref) return d.head(nu); // roundoff floor
    } else {
      stalled = 0;
    }
    best = best < 0.0 ? rn : std::min(best, rn);

    Mat A = Mat::Zero(nu + np, nu + np);
    A.topLeftCorner(nu, nu) = Mat(tangent_stiffness(sub.span, d).topLeftCorner(nu, nu));
    A.topRightCorner(nu, np) = MPhi;
    A.bottomLeftCorner(np, nu) = MPhi.transpose();
    Vec rhs = Vec::Zero(nu + np);
    rhs.head(nu) = -r;
    const Vec step = Eigen::PartialPivLU<Mat>(A).solve(rhs);
    v += step.head(nu);
  }
  throw std::runtime_error("condensation: Newton did not converge in 50 iterations");
}

double scaling_probe(const std::function<double(double)>& err, const std::vector<double>& eps) {
  if (eps.size() < 2) throw std::invalid_argument("scaling_probe: need at least two samples");
  const int n = static_cast<int>(eps.size());
  Vec lx(n), ly(n);
  for (int i = 0; i < n; ++i) {
    if (!(eps[i] > 0.0)) throw std::invalid_argument("scaling_probe: nonpositive eps");
    const double v = err(eps[i]);
    if (!(v > 0.0)) throw std::invalid_argument("scaling_probe: nonpositive error sample");
    lx[i] = std::log(eps[i]);
    ly[i] = std::log(v);
  }
  const double mx = lx.mean(), my = ly.mean();
  const double sxx = (lx.array() - mx).square().sum();
  if (sxx == 0.0) throw std::invalid_argument("scaling_probe: eps values coincide");
  return (lx.array() - mx).matrix().dot((ly.array() - my).matrix()) / sxx;
}

} // namespace nlcb::verify
