#include "nlcb/element.hpp"

#include <cmath>
#include <stdexcept>

namespace nlcb {

GaussRule membrane_rule() {
  const double d = 0.5 / std::sqrt(3.0);
  return {{0.5 - d, 0.5 + d, 0.0}, {0.5, 0.5, 0.0}, 2};
}

GaussRule bending_rule() {
  const double d = 0.5 * std::sqrt(3.0 / 5.0);
  return {{0.5 - d, 0.5, 0.5 + d}, {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0}, 3};
}

void shape_rows(double s, double L, Vec6& a, Vec6& b, Vec6& e) {
  a.setZero();
  b.setZero();
  e.setZero();
  a[0] = -1.0 / L;
  a[3] = 1.0 / L;
  // Hermite derivatives w.r.t. the physical coordinate
  b[1] = (-6.0 * s + 6.0 * s * s) / L;
  b[2] = 1.0 - 4.0 * s + 3.0 * s * s;
  b[4] = (6.0 * s - 6.0 * s * s) / L;
  b[5] = -2.0 * s + 3.0 * s * s;
  e[1] = (-6.0 + 12.0 * s) / (L * L);
  e[2] = (-4.0 + 6.0 * s) / L;
  e[4] = (6.0 - 12.0 * s) / (L * L);
  e[5] = (-2.0 + 6.0 * s) / L;
}

ElementTensors element_operators(double L, const std::array<double, 2>& g0, const Section& sec,
                                 const Material& mat) {
  if (!(L > 0.0) || !std::isfinite(L)) throw std::invalid_argument("element: nonpositive length");
  if (!std::isfinite(g0[0]) || !std::isfinite(g0[1]))
    throw std::invalid_argument("element: non-finite initial slope");
  if (!(sec.area() > 0.0) || !(sec.inertia() > 0.0))
    throw std::invalid_argument("element: nonpositive section");
  if (!(mat.youngs_modulus > 0.0) || !(mat.density > 0.0))
    throw std::invalid_argument("element: nonpositive material");

  const double EA = mat.youngs_modulus * sec.area();
  const double EI = mat.youngs_modulus * sec.inertia();

  ElementTensors el;
  Vec6 a, b, e;

  // membrane: energy density EA/2 (c.d + (b.d)^2/2)^2 with c = a + g0 b
  const GaussRule gm = membrane_rule();
  for (int g = 0; g < gm.n; ++g) {
    shape_rows(gm.s[g], L, a, b, e);
    const Vec6 c = a + g0[g] * b;
    const double w = gm.w[g] * L * EA;
    el.Ke.noalias() += w * (c * c.transpose());
    for (int j = 0; j < 6; ++j)
      for (int k = j; k < 6; ++k) {
        const double cb = c[j] * b[k] + b[j] * c[k];
        for (int i = 0; i < 6; ++i)
          el.K2e.add(i, j, k, 0.5 * w * (c[i] * b[j] * b[k] + b[i] * cb));
        for (int l = k; l < 6; ++l)
          for (int i = 0; i < 6; ++i)
            el.K3e.add(i, j, k, l, 0.5 * w * b[i] * b[j] * b[k] * b[l]);
      }
  }

  const GaussRule gb = bending_rule();
  for (int g = 0; g < gb.n; ++g) {
    shape_rows(gb.s[g], L, a, b, e);
    el.Ke.noalias() += (gb.w[g] * L * EI) * (e * e.transpose());
  }

  // consistent mass: linear axial + Hermite transverse
  const double m = mat.density * sec.area() * L;
  el.Me(0, 0) = el.Me(3, 3) = m / 3.0;
  el.Me(0, 3) = el.Me(3, 0) = m / 6.0;
  const double c1 = m / 420.0;
  const int t[4] = {1, 2, 4, 5};
  const double Mt[4][4] = {
      {156.0, 22.0 * L, 54.0, -13.0 * L},
      {22.0 * L, 4.0 * L * L, 13.0 * L, -3.0 * L * L},
      {54.0, 13.0 * L, 156.0, -22.0 * L},
      {-13.0 * L, -3.0 * L * L, -22.0 * L, 4.0 * L * L},
  };
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) el.Me(t[i], t[j]) = c1 * Mt[i][j];

  return el;
}

Vec6 element_line_load(double L, double q) {
  Vec6 f = Vec6::Zero();
  f[1] = q * L / 2.0;
  f[2] = q * L * L / 12.0;
  f[4] = q * L / 2.0;
  f[5] = -q * L * L / 12.0;
  return f;
}

} // namespace nlcb
