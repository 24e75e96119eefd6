#include "nlcb/kernels.hpp"

#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace nlcb {

namespace {

int g_threads = 0; // 0: library default

inline Vec6 gather(const std::array<int, 6>& map, const Vec& d) {
  Vec6 v;
  for (int i = 0; i < 6; ++i) v[i] = map[i] >= 0 ? d[map[i]] : 0.0;
  return v;
}

inline void scatter(const std::array<int, 6>& map, const Vec6& fe, Vec& f) {
  for (int i = 0; i < 6; ++i)
    if (map[i] >= 0) f[map[i]] += fe[i];
}

inline Vec6 element_force(const ElementTensors& et, const Vec6& de) {
  Vec6 f = et.Ke * de;
  const Vec d = de;
  f += et.K2e.contract2(d, d);
  f += et.K3e.contract3(d, d, d);
  return f;
}

inline Vec6 element_h(const ElementTensors& et, const Vec6& ve, const Vec6& we) {
  return 2.0 * et.K2e.contract2(ve, we);
}

int active_threads() {
#ifdef _OPENMP
  return g_threads > 0 ? g_threads : omp_get_max_threads();
#else
  return 1;
#endif
}

// Element-loop map-reduce into per-thread vectors, combined in thread order so
// a fixed thread count reproduces results bit-identically.
template <typename PerElement>
Vec accumulate_vector(const ElementSpan& span, Exec exec, PerElement&& fe_of) {
  const int ne = static_cast<int>(span.ids.size());
  if (exec == Exec::Serial) {
    Vec f = Vec::Zero(span.ndof);
    for (int e = 0; e < ne; ++e) scatter(span.dofmap[e], fe_of(e), f);
    return f;
  }
  const int nt = active_threads();
  std::vector<Vec> partial(nt, Vec::Zero(span.ndof));
#ifdef _OPENMP
#pragma omp parallel num_threads(nt)
  {
    Vec& mine = partial[omp_get_thread_num()];
#pragma omp for schedule(static)
    for (int e = 0; e < ne; ++e) scatter(span.dofmap[e], fe_of(e), mine);
  }
#else
  for (int e = 0; e < ne; ++e) scatter(span.dofmap[e], fe_of(e), partial[0]);
#endif
  Vec f = Vec::Zero(span.ndof);
  for (const Vec& p : partial) f += p;
  return f;
}

} // namespace

void set_parallel_threads(int n) { g_threads = n; }
int parallel_threads() { return active_threads(); }

Vec internal_force(const ElementSpan& span, const Vec& d, Exec exec) {
  if (d.size() != span.ndof) throw std::invalid_argument("internal_force: size mismatch");
  return accumulate_vector(span, exec, [&](int e) {
    const auto& et = (*span.tensors)[span.ids[e]];
    return element_force(et, gather(span.dofmap[e], d));
  });
}

SpMat tangent_stiffness(const ElementSpan& span, const Vec& d, Exec exec) {
  if (d.size() != span.ndof) throw std::invalid_argument("tangent_stiffness: size mismatch");
  const int ne = static_cast<int>(span.ids.size());
  const auto element_kt = [&](int e) -> Mat6 {
    const auto& et = (*span.tensors)[span.ids[e]];
    const Vec6 de = gather(span.dofmap[e], d);
    Mat6 kt = et.Ke;
    kt += 2.0 * et.K2e.contract1(de);
    kt += 3.0 * et.K3e.contract2(de, de);
    return kt;
  };

  std::vector<std::vector<Triplet>> parts;
  if (exec == Exec::Serial) {
    parts.resize(1);
    for (int e = 0; e < ne; ++e) {
      const Mat6 kt = element_kt(e);
      const auto& map = span.dofmap[e];
      for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
          if (map[i] >= 0 && map[j] >= 0) parts[0].emplace_back(map[i], map[j], kt(i, j));
    }
  } else {
    const int nt = active_threads();
    parts.resize(nt);
#ifdef _OPENMP
#pragma omp parallel num_threads(nt)
    {
      auto& mine = parts[omp_get_thread_num()];
#pragma omp for schedule(static)
      for (int e = 0; e < ne; ++e) {
        const Mat6 kt = element_kt(e);
        const auto& map = span.dofmap[e];
        for (int i = 0; i < 6; ++i)
          for (int j = 0; j < 6; ++j)
            if (map[i] >= 0 && map[j] >= 0) mine.emplace_back(map[i], map[j], kt(i, j));
      }
    }
#else
    for (int e = 0; e < ne; ++e) {
      const Mat6 kt = element_kt(e);
      const auto& map = span.dofmap[e];
      for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
          if (map[i] >= 0 && map[j] >= 0) parts[0].emplace_back(map[i], map[j], kt(i, j));
    }
#endif
  }
  std::vector<Triplet> all;
  size_t total = 0;
  for (const auto& p : parts) total += p.size();
  all.reserve(total);
  for (const auto& p : parts) all.insert(all.end(), p.begin(), p.end());
  SpMat kt(span.ndof, span.ndof);
  kt.setFromTriplets(all.begin(), all.end());
  return kt;
}

double strain_energy(const ElementSpan& span, const Vec& d) {
  if (d.size() != span.ndof) throw std::invalid_argument("strain_energy: size mismatch");
  double v = 0.0;
  for (size_t e = 0; e < span.ids.size(); ++e) {
    const auto& et = (*span.tensors)[span.ids[e]];
    const Vec6 de = gather(span.dofmap[e], d);
    const Vec dd = de;
    v += 0.5 * de.dot(et.Ke * de);
    v += de.dot(et.K2e.contract2(dd, dd)) / 3.0;
    v += de.dot(et.K3e.contract3(dd, dd, dd)) / 4.0;
  }
  return v;
}

Vec tangent_derivative_apply(const ElementSpan& span, const Vec& v, const Vec& w, Exec exec) {
  if (v.size() != span.ndof || w.size() != span.ndof)
    throw std::invalid_argument("tangent_derivative_apply: size mismatch");
  return accumulate_vector(span, exec, [&](int e) {
    const auto& et = (*span.tensors)[span.ids[e]];
    return element_h(et, gather(span.dofmap[e], v), gather(span.dofmap[e], w));
  });
}

Vec tangent_derivative_fd(const ElementSpan& span, const Vec& v, const Vec& w, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("tangent_derivative_fd: nonpositive step");
  const SpMat kp = tangent_stiffness(span, Vec(step * v));
  const SpMat km = tangent_stiffness(span, Vec(-step * v));
  return (kp * w - km * w) / (2.0 * step);
}

} // namespace nlcb
