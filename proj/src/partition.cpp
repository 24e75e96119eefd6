#include "nlcb/partition.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace nlcb {

namespace {

SpMat block(const SpMat& A, const std::vector<int>& rows, const std::vector<int>& cols) {
  // rows/cols are local positions into A (A is the substructure-local matrix)
  std::vector<int> rmap(A.rows(), -1), cmap(A.cols(), -1);
  for (size_t i = 0; i < rows.size(); ++i) rmap[rows[i]] = static_cast<int>(i);
  for (size_t j = 0; j < cols.size(); ++j) cmap[cols[j]] = static_cast<int>(j);
  std::vector<Triplet> t;
  for (int o = 0; o < A.outerSize(); ++o)
    for (SpMat::InnerIterator it(A, o); it; ++it)
      if (rmap[it.row()] >= 0 && cmap[it.col()] >= 0)
        t.emplace_back(rmap[it.row()], cmap[it.col()], it.value());
  SpMat out(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

} // namespace

Partition partition_model(const BeamModel& model, const GlobalOperators& ops,
                          const std::vector<std::vector<int>>& interface_nodes) {
  const int nn = static_cast<int>(model.nodes.size());
  std::vector<int> iface_of_node(nn, -1);
  Partition part;
  for (size_t i = 0; i < interface_nodes.size(); ++i) {
    Interface f;
    f.nodes = interface_nodes[i];
    if (f.nodes.empty()) throw std::invalid_argument("partition: empty interface node set");
    std::sort(f.nodes.begin(), f.nodes.end());
    for (int n : f.nodes) {
      if (n < 0 || n >= nn) throw std::invalid_argument("partition: interface node out of range");
      if (iface_of_node[n] >= 0) throw std::invalid_argument("partition: node on two interfaces");
      iface_of_node[n] = static_cast<int>(i);
      for (int k = 0; k < 3; ++k) {
        const int fd = model.free_dof(n, k);
        if (fd >= 0) f.free_dofs.push_back(fd);
      }
    }
    if (f.free_dofs.empty())
      throw std::invalid_argument("partition: interface has no free DoFs");
    part.interfaces.push_back(std::move(f));
  }

  // Flood-fill elements across shared non-interface nodes; each component is a
  // substructure and interfaces are the only permitted separators.
  const int ne = static_cast<int>(model.elements.size());
  std::vector<std::vector<int>> elems_at_node(nn);
  for (int e = 0; e < ne; ++e) {
    elems_at_node[model.elements[e].n1].push_back(e);
    elems_at_node[model.elements[e].n2].push_back(e);
  }
  std::vector<int> sub_of_elem(ne, -1);
  int ns = 0;
  for (int seed = 0; seed < ne; ++seed) {
    if (sub_of_elem[seed] >= 0) continue;
    std::vector<int> stack{seed};
    sub_of_elem[seed] = ns;
    while (!stack.empty()) {
      const int e = stack.back();
      stack.pop_back();
      for (int n : {model.elements[e].n1, model.elements[e].n2}) {
        if (iface_of_node[n] >= 0) continue;
        for (int o : elems_at_node[n])
          if (sub_of_elem[o] < 0) {
            sub_of_elem[o] = ns;
            stack.push_back(o);
          }
      }
    }
    ++ns;
  }

  // element order within a substructure follows mesh order (deterministic)
  part.subs.resize(ns);
  for (int e = 0; e < ne; ++e) part.subs[sub_of_elem[e]].element_ids.push_back(e);

  for (int s = 0; s < ns; ++s) {
    Substructure& sub = part.subs[s];
    std::set<int> internal, iface_set;
    for (int e : sub.element_ids)
      for (int n : {model.elements[e].n1, model.elements[e].n2}) {
        const int f = iface_of_node[n];
        if (f >= 0)
          iface_set.insert(f);
        else
          internal.insert(n);
      }
    sub.interfaces.assign(iface_set.begin(), iface_set.end());
    for (int ifc : sub.interfaces) {
      auto& owners = part.interfaces[ifc].subs;
      owners.push_back(s);
    }
    for (int n : internal)
      for (int k = 0; k < 3; ++k) {
        const int fd = model.free_dof(n, k);
        if (fd >= 0) sub.internal_dofs.push_back(fd);
      }
    std::sort(sub.internal_dofs.begin(), sub.internal_dofs.end());
    for (int ifc : sub.interfaces)
      for (int fd : part.interfaces[ifc].free_dofs) sub.interface_dofs.push_back(fd);
    sub.n_u = static_cast<int>(sub.internal_dofs.size());
    sub.n_q = static_cast<int>(sub.interface_dofs.size());
    if (sub.n_u == 0)
      throw std::invalid_argument("partition: substructure without internal DoFs "
                                  "(interface nodes too close together?)");
  }
  for (const Interface& f : part.interfaces)
    if (f.subs.size() < 2)
      throw std::invalid_argument("partition: interface does not separate two substructures");

  // separator check: an internal DoF may belong to exactly one substructure
  {
    std::vector<int> owner(ops.K.rows(), -1);
    for (int s = 0; s < ns; ++s)
      for (int fd : part.subs[s].internal_dofs) {
        if (owner[fd] >= 0)
          throw std::invalid_argument("partition: internal DoF shared by two substructures");
        owner[fd] = s;
      }
  }

  // localization, spans, local operators
  for (int s = 0; s < ns; ++s) {
    Substructure& sub = part.subs[s];
    std::vector<int> local_all = sub.internal_dofs;
    local_all.insert(local_all.end(), sub.interface_dofs.begin(), sub.interface_dofs.end());

    std::vector<Triplet> lt;
    for (size_t i = 0; i < local_all.size(); ++i) lt.emplace_back(static_cast<int>(i), local_all[i], 1.0);
    SpMat L(sub.n(), ops.K.rows());
    L.setFromTriplets(lt.begin(), lt.end());
    part.L.push_back(L);

    std::vector<int> glob_to_local(ops.K.rows(), -1);
    for (size_t i = 0; i < local_all.size(); ++i) glob_to_local[local_all[i]] = static_cast<int>(i);

    sub.span.tensors = &model.element_tensors;
    sub.span.ids = sub.element_ids;
    sub.span.ndof = sub.n();
    for (int e : sub.element_ids) {
      std::array<int, 6> map{};
      for (int i = 0; i < 6; ++i) {
        const int g = model.element_dofs[e][i];
        map[i] = g >= 0 ? glob_to_local[g] : -1;
      }
      sub.span.dofmap.push_back(map);
    }

    // local operator assembly over own elements only
    std::vector<Triplet> tm, tk;
    for (size_t idx = 0; idx < sub.span.ids.size(); ++idx) {
      const auto& et = model.element_tensors[sub.span.ids[idx]];
      const auto& map = sub.span.dofmap[idx];
      for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
          if (map[i] >= 0 && map[j] >= 0) {
            tk.emplace_back(map[i], map[j], et.Ke(i, j));
            tm.emplace_back(map[i], map[j], et.Me(i, j));
          }
    }
    sub.M.resize(sub.n(), sub.n());
    sub.K.resize(sub.n(), sub.n());
    sub.M.setFromTriplets(tm.begin(), tm.end());
    sub.K.setFromTriplets(tk.begin(), tk.end());
    sub.D = model.rayleigh_alpha * sub.M + model.rayleigh_beta * sub.K;

    std::vector<int> iu(sub.n_u), iq(sub.n_q);
    for (int i = 0; i < sub.n_u; ++i) iu[i] = i;
    for (int i = 0; i < sub.n_q; ++i) iq[i] = sub.n_u + i;
    sub.Kuu = block(sub.K, iu, iu);
    sub.Kuq = block(sub.K, iu, iq);
    sub.Kqq = block(sub.K, iq, iq);
    sub.Muu = block(sub.M, iu, iu);
    sub.Muq = block(sub.M, iu, iq);
  }

  // signed compatibility pairs in substructure index order
  for (int s = 0; s < ns; ++s) {
    SpMat B(0, part.subs[s].n());
    part.B.push_back(B);
  }
  std::vector<std::vector<Triplet>> bt(ns);
  int row = 0;
  for (const auto& f : part.interfaces) {
    if (f.subs.size() < 2) continue;
    for (size_t p = 0; p + 1 < f.subs.size(); ++p) {
      const int s1 = f.subs[p], s2 = f.subs[p + 1];
      for (int fd : f.free_dofs) {
        const auto local_of = [&](int s, int dof) {
          const auto& v = part.subs[s].interface_dofs;
          const auto it = std::find(v.begin(), v.end(), dof);
          return part.subs[s].n_u + static_cast<int>(it - v.begin());
        };
        bt[s1].emplace_back(row, local_of(s1, fd), 1.0);
        bt[s2].emplace_back(row, local_of(s2, fd), -1.0);
        ++row;
      }
    }
  }
  for (int s = 0; s < ns; ++s) {
    part.B[s].resize(row, part.subs[s].n());
    part.B[s].setFromTriplets(bt[s].begin(), bt[s].end());
  }
  return part;
}

Partition partition_at(const BeamModel& model, const GlobalOperators& ops,
                       const std::vector<double>& cut_positions) {
  std::vector<std::vector<int>> ifn;
  std::set<int> used;
  for (double x : cut_positions) {
    const int n = model.node_nearest(x);
    if (used.count(n)) throw std::invalid_argument("partition_at: duplicate cut node");
    used.insert(n);
    ifn.push_back({n});
  }
  return partition_model(model, ops, ifn);
}

SpMat primal_assemble(const std::vector<SpMat>& ops, const std::vector<SpMat>& L, int n_glob) {
  if (ops.size() != L.size()) throw std::invalid_argument("primal_assemble: size mismatch");
  SpMat A(n_glob, n_glob);
  for (size_t s = 0; s < ops.size(); ++s) A += SpMat(L[s].transpose() * ops[s] * L[s]);
  return A;
}

} // namespace nlcb
