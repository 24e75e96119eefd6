#include "nlcb/rom.hpp"

#include <fstream>
#include <stdexcept>
#include <utility>

#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace nlcb {

namespace {

// Rows of a substructure-level matrix at the element's local DoFs; fixed DoFs
// (map entry -1) become zero rows.
Mat gather_rows(const Mat& A, const std::array<int, 6>& map) {
  Mat R = Mat::Zero(6, A.cols());
  for (int i = 0; i < 6; ++i)
    if (map[i] >= 0) R.row(i) = A.row(map[i]);
  return R;
}

// Per-thread accumulator of one substructure's reduced tensors. The manifold
// cross terms are built unsymmetrized in a full m^4 scratch and folded into
// packed storage once at the end; symmetrizing only the trailing triple
// leaves the reduced force of the unsymmetrized sum unchanged.
struct TensorAcc {
  Mat K2; // m x pairs(m)
  Mat K3; // m x triples(m), pure cubic Galerkin part
  Vec T4; // m^4 cross-term scratch, index ((a m + b) m + c) m + d
  TensorAcc(int m, int npairs, int ntriples)
      : K2(Mat::Zero(m, npairs)),
        K3(Mat::Zero(m, ntriples)),
        T4(Vec::Zero(static_cast<Eigen::Index>(m) * m * m * m)) {}
  void add(const TensorAcc& o) {
    K2 += o.K2;
    K3 += o.K3;
    T4 += o.T4;
  }
};

// Distinct arrangements of a sorted pair / triple.
int pair_perms(int j, int k, std::array<std::pair<int, int>, 2>& out) {
  out[0] = {j, k};
  if (j == k) return 1;
  out[1] = {k, j};
  return 2;
}

int triple_perms(int j, int k, int l, std::array<std::array<int, 3>, 6>& out) {
  int n = 0;
  auto push = [&](int a, int b, int c) { out[n++] = {a, b, c}; };
  push(j, k, l);
  if (j == k && k == l) return n;
  if (j == k) {
    push(j, l, k);
    push(l, j, k);
  } else if (k == l) {
    push(k, j, l);
    push(k, l, j);
  } else {
    push(j, l, k);
    push(k, j, l);
    push(k, l, j);
    push(l, j, k);
    push(l, k, j);
  }
  return n;
}

// One element's contribution. Le/Qe are the manifold's linear and quadratic
// rows at the element DoFs; out_pairs/out_triples are the packed layouts of
// the m-dimensional targets (out_pairs also indexes the columns of Qe).
void project_element(const ElementTensors& et, const Mat& Le, const Mat& Qe,
                     const std::vector<std::pair<int, int>>& out_pairs,
                     const std::vector<std::array<int, 3>>& out_triples, TensorAcc& acc) {
  const int m = static_cast<int>(Le.cols());
  const int mm = m * m;

  // Expand the element's Q rows to full m x m (symmetric) for the cross term.
  std::array<Mat, 6> Qfull;
  for (int i = 0; i < 6; ++i) {
    Qfull[i] = Mat::Zero(m, m);
    for (int p = 0; p < static_cast<int>(out_pairs.size()); ++p) {
      const double v = Qe(i, p);
      Qfull[i](out_pairs[p].first, out_pairs[p].second) = v;
      Qfull[i](out_pairs[p].second, out_pairs[p].first) = v;
    }
  }

  std::array<std::pair<int, int>, 2> pp;
  const auto& k2pairs = et.K2e.pair_list();
  for (int p = 0; p < static_cast<int>(k2pairs.size()); ++p) {
    const int j = k2pairs[p].first, k = k2pairs[p].second;
    const Vec tau = Le.transpose() * Vec(et.K2e.data().col(p));
    if (tau.isZero(0.0)) continue;
    const auto rj = Le.row(j), rk = Le.row(k);

    // Pure Galerkin quadratic term; the trailing form is already symmetric.
    for (int q = 0; q < static_cast<int>(out_pairs.size()); ++q) {
      const int b = out_pairs[q].first, c = out_pairs[q].second;
      const double s = j == k ? rj[b] * rj[c] : rj[b] * rk[c] + rk[b] * rj[c];
      if (s != 0.0) acc.K2.col(q) += tau * s;
    }

    // Cross term K2e:(L ., Q ..); the mirrored argument order equals it after
    // trailing symmetrization, hence the factor 2 applied by the caller.
    const int np = pair_perms(j, k, pp);
    for (int t = 0; t < np; ++t) {
      const auto rp = Le.row(pp[t].first);
      const Eigen::Map<const Vec> qflat(Qfull[pp[t].second].data(), mm);
      for (int a = 0; a < m; ++a) {
        if (tau[a] == 0.0) continue;
        for (int b = 0; b < m; ++b) {
          const double w = tau[a] * rp[b];
          if (w == 0.0) continue;
          acc.T4.segment(static_cast<Eigen::Index>(a) * m * mm + static_cast<Eigen::Index>(b) * mm,
                         mm) += w * qflat;
        }
      }
    }
  }

  std::array<std::array<int, 3>, 6> tp;
  const auto& k3triples = et.K3e.triple_list();
  for (int t = 0; t < static_cast<int>(k3triples.size()); ++t) {
    const int j = k3triples[t][0], k = k3triples[t][1], l = k3triples[t][2];
    const Vec tau = Le.transpose() * Vec(et.K3e.data().col(t));
    if (tau.isZero(0.0)) continue;
    const int np = triple_perms(j, k, l, tp);
    for (int q = 0; q < static_cast<int>(out_triples.size()); ++q) {
      const auto& trip = out_triples[q];
      double s = 0.0;
      for (int u = 0; u < np; ++u)
        s += Le(tp[u][0], trip[0]) * Le(tp[u][1], trip[1]) * Le(tp[u][2], trip[2]);
      if (s != 0.0) acc.K3.col(q) += tau * s;
    }
  }
}

Mat projected(const SpMat& A, const Mat& L) {
  const Mat AL = A * L;
  Mat R = L.transpose() * AL;
  return 0.5 * (R + R.transpose());
}

int active_threads() {
#ifdef _OPENMP
  return parallel_threads();
#else
  return 1;
#endif
}

} // namespace

SubstructureRom project_substructure(const Substructure& sub, const Manifold& man, Exec exec) {
  if (man.L.rows() != sub.n())
    throw std::invalid_argument("project_substructure: manifold/substructure size mismatch");
  const int m = man.m();

  SubstructureRom rom;
  rom.n_phi = man.n_phi;
  rom.n_chi = man.n_chi;
  rom.Mr = projected(sub.M, man.L);
  rom.Dr = projected(sub.D, man.L);
  rom.Kr = projected(sub.K, man.L);

  SymTensor3 K2r(m, m);
  SymTensor4 K3r(m, m);
  const auto& out_pairs = K2r.pair_list();
  const auto& out_triples = K3r.triple_list();
  const int npairs = K2r.pairs(), ntriples = K3r.triples();
  const int ne = static_cast<int>(sub.span.ids.size());

  auto element_rows = [&](int e, Mat& Le, Mat& Qe) {
    Le = gather_rows(man.L, sub.span.dofmap[e]);
    Qe = gather_rows(man.Q.data(), sub.span.dofmap[e]);
  };

  TensorAcc total(m, npairs, ntriples);
  if (exec == Exec::Serial) {
    Mat Le, Qe;
    for (int e = 0; e < ne; ++e) {
      element_rows(e, Le, Qe);
      project_element((*sub.span.tensors)[sub.span.ids[e]], Le, Qe, out_pairs, out_triples, total);
    }
  } else {
    const int nt = active_threads();
    std::vector<TensorAcc> partial;
    partial.reserve(nt);
    for (int i = 0; i < nt; ++i) partial.emplace_back(m, npairs, ntriples);
#ifdef _OPENMP
#pragma omp parallel num_threads(nt)
    {
      TensorAcc& mine = partial[omp_get_thread_num()];
      Mat Le, Qe;
#pragma omp for schedule(static)
      for (int e = 0; e < ne; ++e) {
        element_rows(e, Le, Qe);
        project_element((*sub.span.tensors)[sub.span.ids[e]], Le, Qe, out_pairs, out_triples, mine);
      }
    }
#else
    {
      Mat Le, Qe;
      for (int e = 0; e < ne; ++e) {
        element_rows(e, Le, Qe);
        project_element((*sub.span.tensors)[sub.span.ids[e]], Le, Qe, out_pairs, out_triples,
                        partial[0]);
      }
    }
#endif
    for (const TensorAcc& p : partial) total.add(p);
  }

  K2r.data() = total.K2;

  // Fold the cross-term scratch: trailing-symmetrize, double for the two
  // argument orders, add the pure cubic part.
  const auto t4 = [&](int a, int b, int c, int d) {
    return total.T4[((static_cast<Eigen::Index>(a) * m + b) * m + c) * m + d];
  };
  for (int q = 0; q < ntriples; ++q) {
    const int b = out_triples[q][0], c = out_triples[q][1], d = out_triples[q][2];
    for (int a = 0; a < m; ++a) {
      const double sym = (t4(a, b, c, d) + t4(a, b, d, c) + t4(a, c, b, d) + t4(a, c, d, b) +
                          t4(a, d, b, c) + t4(a, d, c, b)) /
                         6.0;
      K3r.data()(a, q) = total.K3(a, q) + 2.0 * sym;
    }
  }

  rom.K2r = std::move(K2r);
  rom.K3r = std::move(K3r);
  return rom;
}

Mat cb_basis(const Substructure& sub, const ModeSet& fim, const Mat& Psi) {
  const int n_phi = static_cast<int>(fim.shapes.cols());
  const int n_chi = static_cast<int>(Psi.cols());
  if (fim.shapes.rows() != sub.n_u || Psi.rows() != sub.n_q)
    throw std::invalid_argument("cb_basis: basis/substructure size mismatch");
  Mat V = Mat::Zero(sub.n(), n_phi + n_chi);
  V.topLeftCorner(sub.n_u, n_phi) = fim.shapes;
  V.topRightCorner(sub.n_u, n_chi) = static_modes(sub.Kuu, sub.Kuq) * Psi;
  V.bottomRightCorner(sub.n_q, n_chi) = Psi;
  return V;
}

SubstructureRom classic_cb_rom(const Substructure& sub, const ModeSet& fim, const Mat& Psi) {
  const Mat V = cb_basis(sub, fim, Psi);

  SubstructureRom rom;
  rom.n_phi = static_cast<int>(fim.shapes.cols());
  rom.n_chi = static_cast<int>(Psi.cols());
  rom.Mr = projected(sub.M, V);
  rom.Dr = projected(sub.D, V);
  rom.Kr = projected(sub.K, V);
  return rom;
}

Vec ReducedModel::force(const Vec& xi) const {
  Vec f = Kr * xi;
  if (nonlinear) {
    f += K2r.contract2(xi, xi);
    f += K3r.contract3(xi, xi, xi);
  }
  return f;
}

Mat ReducedModel::jacobian(const Vec& xi) const {
  Mat J = Kr;
  if (nonlinear) {
    J += 2.0 * K2r.contract1(xi);
    J += 3.0 * K3r.contract2(xi, xi);
  }
  return J;
}

double ReducedModel::potential(const Vec& xi) const {
  double v = 0.5 * xi.dot(Kr * xi);
  if (nonlinear) {
    v += xi.dot(K2r.contract2(xi, xi)) / 3.0;
    v += 0.25 * xi.dot(K3r.contract3(xi, xi, xi));
  }
  return v;
}

double ReducedModel::kinetic(const Vec& xidot) const { return 0.5 * xidot.dot(Mr * xidot); }

Vec ReducedModel::localize(const Vec& xi, int s) const {
  const auto& ms = map.at(s);
  Vec out(ms.size());
  for (int i = 0; i < static_cast<int>(ms.size()); ++i) out[i] = xi[ms[i]];
  return out;
}

RomAssembly assemble_rom(const Partition& part, std::vector<SubstructureRom> roms,
                         std::vector<Manifold> manifolds, std::vector<int> iface_width) {
  const int ns = static_cast<int>(part.subs.size());
  if (static_cast<int>(roms.size()) != ns || static_cast<int>(manifolds.size()) != ns)
    throw std::invalid_argument("assemble_rom: one ROM and manifold per substructure required");
  if (iface_width.size() != part.interfaces.size())
    throw std::invalid_argument("assemble_rom: one width per interface required");

  int total_eta = 0;
  std::vector<int> eta_off(ns);
  for (int s = 0; s < ns; ++s) {
    eta_off[s] = total_eta;
    total_eta += roms[s].n_phi;
  }
  std::vector<int> chi_off(iface_width.size());
  int mg = total_eta;
  for (size_t i = 0; i < iface_width.size(); ++i) {
    chi_off[i] = mg;
    mg += iface_width[i];
  }

  ReducedModel rm;
  rm.m = mg;
  rm.map.resize(ns);
  for (int s = 0; s < ns; ++s) {
    int expect_chi = 0;
    for (int ifc : part.subs[s].interfaces) expect_chi += iface_width[ifc];
    if (expect_chi != roms[s].n_chi || roms[s].m() != manifolds[s].m())
      throw std::invalid_argument("assemble_rom: interface widths inconsistent with ROM blocks");
    auto& ms = rm.map[s];
    ms.reserve(roms[s].m());
    for (int i = 0; i < roms[s].n_phi; ++i) ms.push_back(eta_off[s] + i);
    for (int ifc : part.subs[s].interfaces)
      for (int j = 0; j < iface_width[ifc]; ++j) ms.push_back(chi_off[ifc] + j);
    for (size_t i = 1; i < ms.size(); ++i)
      if (ms[i] <= ms[i - 1]) throw std::logic_error("assemble_rom: map not increasing");
  }

  rm.Mr = Mat::Zero(mg, mg);
  rm.Dr = Mat::Zero(mg, mg);
  rm.Kr = Mat::Zero(mg, mg);
  rm.nonlinear = false;
  for (int s = 0; s < ns; ++s)
    if (roms[s].nonlinear()) rm.nonlinear = true;
  if (rm.nonlinear) {
    rm.K2r = SymTensor3(mg, mg);
    rm.K3r = SymTensor4(mg, mg);
  }

  for (int s = 0; s < ns; ++s) {
    const auto& ms = rm.map[s];
    const int msz = roms[s].m();
    for (int a = 0; a < msz; ++a)
      for (int b = 0; b < msz; ++b) {
        rm.Mr(ms[a], ms[b]) += roms[s].Mr(a, b);
        rm.Dr(ms[a], ms[b]) += roms[s].Dr(a, b);
        rm.Kr(ms[a], ms[b]) += roms[s].Kr(a, b);
      }
    if (!roms[s].nonlinear()) continue;
    // Packed-to-packed scatter: the map is increasing, so sorted local pairs
    // and triples stay sorted globally.
    const auto& lp = roms[s].K2r.pair_list();
    for (int q = 0; q < roms[s].K2r.pairs(); ++q) {
      const int gq = SymTensor3::pair_index(ms[lp[q].first], ms[lp[q].second], mg);
      for (int a = 0; a < msz; ++a) rm.K2r.data()(ms[a], gq) += roms[s].K2r.data()(a, q);
    }
    const auto& lt = roms[s].K3r.triple_list();
    for (int q = 0; q < roms[s].K3r.triples(); ++q) {
      const int gq = SymTensor4::triple_index(ms[lt[q][0]], ms[lt[q][1]], ms[lt[q][2]], mg);
      for (int a = 0; a < msz; ++a) rm.K3r.data()(ms[a], gq) += roms[s].K3r.data()(a, q);
    }
  }

  RomAssembly out;
  out.model = std::move(rm);
  out.manifolds = std::move(manifolds);
  out.sub_roms = std::move(roms);
  out.iface_width = std::move(iface_width);
  return out;
}

Vec RomAssembly::reduce_load(const std::vector<Vec>& sub_loads) const {
  if (sub_loads.size() != manifolds.size())
    throw std::invalid_argument("reduce_load: one load per substructure required");
  // sub_loads must partition the global load: entries of shared interface
  // DoFs split between owners with weights summing to one. The interface rows
  // of L agree across owners, so any such split reduces identically.
  Vec r = Vec::Zero(model.m);
  for (size_t s = 0; s < manifolds.size(); ++s) {
    if (sub_loads[s].size() != manifolds[s].L.rows())
      throw std::invalid_argument("reduce_load: load/substructure size mismatch");
    const Vec fr = manifolds[s].L.transpose() * sub_loads[s];
    const auto& ms = model.map[s];
    for (int i = 0; i < static_cast<int>(ms.size()); ++i) r[ms[i]] += fr[i];
  }
  return r;
}

std::vector<Vec> split_load(const Partition& part, const Vec& f_glob) {
  std::vector<int> owners(f_glob.size(), 1);
  for (const Interface& ifc : part.interfaces)
    for (int g : ifc.free_dofs) owners[g] = static_cast<int>(ifc.subs.size());
  std::vector<Vec> out;
  out.reserve(part.subs.size());
  for (const Substructure& sub : part.subs) {
    Vec f(sub.n());
    for (int i = 0; i < sub.n_u; ++i) f[i] = f_glob[sub.internal_dofs[i]];
    for (int i = 0; i < sub.n_q; ++i) {
      const int g = sub.interface_dofs[i];
      f[sub.n_u + i] = f_glob[g] / owners[g];
    }
    out.push_back(std::move(f));
  }
  return out;
}

Vec reconstruct(const RomAssembly& rom, const Partition& part, const Vec& xi, int n_glob) {
  if (xi.size() != rom.model.m) throw std::invalid_argument("reconstruct: xi size mismatch");
  Vec d = Vec::Zero(n_glob);
  for (size_t s = 0; s < part.subs.size(); ++s) {
    const Vec ds = rom.manifolds[s].map(rom.model.localize(xi, static_cast<int>(s)));
    const auto& sub = part.subs[s];
    for (int i = 0; i < sub.n_u; ++i) d[sub.internal_dofs[i]] = ds[i];
    for (int i = 0; i < sub.n_q; ++i) d[sub.interface_dofs[i]] = ds[sub.n_u + i];
  }
  return d;
}

Manifold ablate(const Manifold& man, QuadraticAblation what) {
  Manifold out = man;
  if (what == QuadraticAblation::None) return out;
  const auto& pairs = out.Q.pair_list();
  for (int p = 0; p < out.Q.pairs(); ++p) {
    const int a = pairs[p].first, b = pairs[p].second; // a <= b
    const bool chi_pair = a >= man.n_phi;
    const bool cross_pair = a < man.n_phi && b >= man.n_phi;
    const bool kill = what == QuadraticAblation::All ||
                      (what == QuadraticAblation::ChiOnly && chi_pair) ||
                      (what == QuadraticAblation::CrossOnly && cross_pair);
    if (kill) out.Q.data().col(p).setZero();
  }
  return out;
}

namespace {

using nlohmann::json;

json j_mat(const Mat& A) {
  std::vector<double> data(A.data(), A.data() + A.size());
  return json{{"rows", A.rows()}, {"cols", A.cols()}, {"data", data}};
}

Mat mat_from(const json& j) {
  const auto data = j.at("data").get<std::vector<double>>();
  const Eigen::Index rows = j.at("rows").get<Eigen::Index>();
  const Eigen::Index cols = j.at("cols").get<Eigen::Index>();
  if (static_cast<Eigen::Index>(data.size()) != rows * cols)
    throw std::runtime_error("rom import: matrix payload size mismatch");
  Mat A(rows, cols);
  std::copy(data.begin(), data.end(), A.data());
  return A;
}

json j_t3(const SymTensor3& t) {
  return json{{"rows", t.rows()}, {"dim", t.dim()}, {"data", j_mat(t.data())}};
}

SymTensor3 t3_from(const json& j) {
  const int rows = j.at("rows").get<int>(), dim = j.at("dim").get<int>();
  if (rows == 0 || dim == 0) return {};
  SymTensor3 t(rows, dim);
  t.data() = mat_from(j.at("data"));
  if (t.data().rows() != rows || t.data().cols() != t.pairs())
    throw std::runtime_error("rom import: tensor payload size mismatch");
  return t;
}

json j_t4(const SymTensor4& t) {
  return json{{"rows", t.rows()}, {"dim", t.dim()}, {"data", j_mat(t.data())}};
}

SymTensor4 t4_from(const json& j) {
  const int rows = j.at("rows").get<int>(), dim = j.at("dim").get<int>();
  if (rows == 0 || dim == 0) return {};
  SymTensor4 t(rows, dim);
  t.data() = mat_from(j.at("data"));
  if (t.data().rows() != rows || t.data().cols() != t.triples())
    throw std::runtime_error("rom import: tensor payload size mismatch");
  return t;
}

} // namespace

void export_rom(const RomAssembly& rom, const std::string& path) {
  json j;
  j["format"] = "nlcb-rom";
  j["version"] = 1;
  const auto& rm = rom.model;
  j["model"] = json{{"m", rm.m},       {"nonlinear", rm.nonlinear}, {"map", rm.map},
                    {"Mr", j_mat(rm.Mr)}, {"Dr", j_mat(rm.Dr)},     {"Kr", j_mat(rm.Kr)},
                    {"K2r", j_t3(rm.K2r)}, {"K3r", j_t4(rm.K3r)}};
  j["iface_width"] = rom.iface_width;
  j["subs"] = json::array();
  for (const auto& sr : rom.sub_roms)
    j["subs"].push_back(json{{"n_phi", sr.n_phi}, {"n_chi", sr.n_chi}, {"Mr", j_mat(sr.Mr)},
                             {"Dr", j_mat(sr.Dr)}, {"Kr", j_mat(sr.Kr)}, {"K2r", j_t3(sr.K2r)},
                             {"K3r", j_t4(sr.K3r)}});
  j["manifolds"] = json::array();
  for (const auto& man : rom.manifolds)
    j["manifolds"].push_back(json{{"n_phi", man.n_phi},
                                  {"n_chi", man.n_chi},
                                  {"L", j_mat(man.L)},
                                  {"Q", j_t3(man.Q)}});
  std::ofstream out(path);
  if (!out) throw std::runtime_error("export_rom: cannot open " + path);
  out << j.dump();
  if (!out) throw std::runtime_error("export_rom: write failed for " + path);
}

RomAssembly import_rom(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("import_rom: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error("import_rom: " + path + ": " + e.what());
  }
  if (j.value("format", std::string{}) != "nlcb-rom")
    throw std::runtime_error("import_rom: " + path + " is not a ROM file");

  RomAssembly rom;
  const auto& jm = j.at("model");
  rom.model.m = jm.at("m").get<int>();
  rom.model.nonlinear = jm.at("nonlinear").get<bool>();
  rom.model.map = jm.at("map").get<std::vector<std::vector<int>>>();
  rom.model.Mr = mat_from(jm.at("Mr"));
  rom.model.Dr = mat_from(jm.at("Dr"));
  rom.model.Kr = mat_from(jm.at("Kr"));
  rom.model.K2r = t3_from(jm.at("K2r"));
  rom.model.K3r = t4_from(jm.at("K3r"));
  rom.iface_width = j.at("iface_width").get<std::vector<int>>();
  for (const auto& js : j.at("subs")) {
    SubstructureRom sr;
    sr.n_phi = js.at("n_phi").get<int>();
    sr.n_chi = js.at("n_chi").get<int>();
    sr.Mr = mat_from(js.at("Mr"));
    sr.Dr = mat_from(js.at("Dr"));
    sr.Kr = mat_from(js.at("Kr"));
    sr.K2r = t3_from(js.at("K2r"));
    sr.K3r = t4_from(js.at("K3r"));
    rom.sub_roms.push_back(std::move(sr));
  }
  for (const auto& jman : j.at("manifolds")) {
    Manifold man;
    man.n_phi = jman.at("n_phi").get<int>();
    man.n_chi = jman.at("n_chi").get<int>();
    man.L = mat_from(jman.at("L"));
    man.Q = t3_from(jman.at("Q"));
    rom.manifolds.push_back(std::move(man));
  }
  return rom;
}

} // namespace nlcb
