#include "nlcb/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include <Eigen/SparseCholesky>

namespace nlcb {

void BeamModel::finalize() {
  const int ndof = dof_count();
  if (nodes.empty() || elements.empty()) throw std::invalid_argument("model: empty mesh");
  for (const auto& n : nodes)
    if (!std::isfinite(n.x) || !std::isfinite(n.z))
      throw std::invalid_argument("model: non-finite node coordinates");
  for (const auto& e : elements) {
    if (e.n1 < 0 || e.n2 < 0 || e.n1 >= static_cast<int>(nodes.size()) ||
        e.n2 >= static_cast<int>(nodes.size()) || e.n1 == e.n2)
      throw std::invalid_argument("model: bad element connectivity");
  }
  std::set<int> fixed(fixed_dofs.begin(), fixed_dofs.end());
  for (int d : fixed)
    if (d < 0 || d >= ndof) throw std::invalid_argument("model: fixed DoF out of range");

  free_index.assign(ndof, -1);
  n_free = 0;
  for (int d = 0; d < ndof; ++d)
    if (!fixed.count(d)) free_index[d] = n_free++;

  element_tensors.clear();
  element_dofs.clear();
  element_length.clear();
  element_slope0.clear();
  const GaussRule gm = membrane_rule();
  for (const auto& e : elements) {
    const double L = nodes[e.n2].x - nodes[e.n1].x;
    if (!(L > 0.0)) throw std::invalid_argument("model: element with nonpositive span");
    // nodal slopes interpolated linearly to the membrane quadrature points
    const double g1 = nodes[e.n1].slope0, g2 = nodes[e.n2].slope0;
    std::array<double, 2> g0{};
    for (int g = 0; g < 2; ++g) g0[g] = (1.0 - gm.s[g]) * g1 + gm.s[g] * g2;
    element_length.push_back(L);
    element_slope0.push_back(g0);
    element_tensors.push_back(element_operators(L, g0, section, material));
    std::array<int, 6> map{};
    for (int k = 0; k < 3; ++k) {
      map[k] = free_index[3 * e.n1 + k];
      map[3 + k] = free_index[3 * e.n2 + k];
    }
    element_dofs.push_back(map);
  }
}

int BeamModel::node_nearest(double x) const {
  int best = 0;
  double dist = std::abs(nodes[0].x - x);
  for (int i = 1; i < static_cast<int>(nodes.size()); ++i) {
    const double d = std::abs(nodes[i].x - x);
    if (d < dist) {
      dist = d;
      best = i;
    }
  }
  return best;
}

int BeamModel::free_dof(int node, int comp) const { return free_index[3 * node + comp]; }

BeamModel make_beam(int n_elements, double length, double rise, const Section& sec,
                    const Material& mat, double alpha, double beta) {
  if (n_elements < 2) throw std::invalid_argument("make_beam: need at least 2 elements");
  if (!(length > 0.0)) throw std::invalid_argument("make_beam: nonpositive length");
  if (rise < 0.0) throw std::invalid_argument("make_beam: negative rise");

  BeamModel m;
  m.section = sec;
  m.material = mat;
  m.rayleigh_alpha = alpha;
  m.rayleigh_beta = beta;

  const int nn = n_elements + 1;
  double R = 0.0, z0 = 0.0;
  if (rise > 0.0) {
    R = (length * length / 4.0 + rise * rise) / (2.0 * rise);
    z0 = R - rise;
  }
  for (int i = 0; i < nn; ++i) {
    const double x = length * static_cast<double>(i) / n_elements;
    double z = 0.0, g = 0.0;
    if (rise > 0.0) {
      const double dx = x - length / 2.0;
      z = std::sqrt(R * R - dx * dx) - z0;
      g = -dx / (z + z0);
    }
    m.nodes.push_back({x, z, g});
  }
  for (int i = 0; i < n_elements; ++i) m.elements.push_back({i, i + 1});
  for (int k = 0; k < 3; ++k) {
    m.fixed_dofs.push_back(k);
    m.fixed_dofs.push_back(3 * (nn - 1) + k);
  }
  m.finalize();
  return m;
}

GlobalOperators assemble_global(const BeamModel& model) {
  GlobalOperators ops;
  std::vector<Triplet> tm, tk;
  for (size_t e = 0; e < model.elements.size(); ++e) {
    const auto& dofs = model.element_dofs[e];
    const auto& et = model.element_tensors[e];
    for (int i = 0; i < 6; ++i) {
      if (dofs[i] < 0) continue;
      for (int j = 0; j < 6; ++j) {
        if (dofs[j] < 0) continue;
        tk.emplace_back(dofs[i], dofs[j], et.Ke(i, j));
        tm.emplace_back(dofs[i], dofs[j], et.Me(i, j));
      }
    }
  }
  ops.M.resize(model.n_free, model.n_free);
  ops.K.resize(model.n_free, model.n_free);
  ops.M.setFromTriplets(tm.begin(), tm.end());
  ops.K.setFromTriplets(tk.begin(), tk.end());
  ops.D = model.rayleigh_alpha * ops.M + model.rayleigh_beta * ops.K;

  Eigen::SimplicialLLT<SpMat> llt(ops.K);
  ops.stiffness_spd = (llt.info() == Eigen::Success);
  return ops;
}

ElementSpan model_span(const BeamModel& model) {
  ElementSpan span;
  span.tensors = &model.element_tensors;
  span.ids.resize(model.elements.size());
  for (size_t e = 0; e < model.elements.size(); ++e) span.ids[e] = static_cast<int>(e);
  span.dofmap = model.element_dofs;
  span.ndof = model.n_free;
  return span;
}

Vec pressure_load(const BeamModel& model, double p) {
  const double q = p * model.section.width;
  Vec f = Vec::Zero(model.n_free);
  for (size_t e = 0; e < model.elements.size(); ++e) {
    const Vec6 fe = element_line_load(model.element_length[e], q);
    const auto& dofs = model.element_dofs[e];
    for (int i = 0; i < 6; ++i)
      if (dofs[i] >= 0) f[dofs[i]] += fe[i];
  }
  return f;
}

Vec point_load(const BeamModel& model, double x, int comp) {
  Vec f = Vec::Zero(model.n_free);
  const int node = model.node_nearest(x);
  const int idx = model.free_dof(node, comp);
  if (idx < 0) throw std::invalid_argument("point_load: target DoF is fixed");
  f[idx] = 1.0;
  return f;
}

} // namespace nlcb
