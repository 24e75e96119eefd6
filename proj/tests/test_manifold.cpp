#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "helpers.hpp"
#include "nlcb/manifold.hpp"
#include "nlcb/verify.hpp"

using namespace nlcb;

namespace {

struct SubFixture {
  fix::Reduced red;
  const Substructure& sub() const { return red.part.subs[0]; }
  const Manifold& man() const { return red.manifolds[0]; }
  const ModeSet& fim() const { return red.fims[0]; }
  const Mat& psi() const { return red.sub_psi[0]; }
};

SubFixture make_fixture(int elements = 20, int n_fim = 2) {
  return {fix::reduce(fix::flat_beam(elements), {0.6}, n_fim)};
}

// direction with unit peak physical displacement, mixing modal and interface content
Vec probe_direction(const Manifold& man) {
  Vec xi = Vec::Ones(man.m());
  for (int i = 0; i < man.m(); ++i) xi[i] = 1.0 + 0.2 * i;
  const double peak = (man.L * xi).cwiseAbs().maxCoeff();
  return xi / peak;
}

} // namespace

TEST_CASE("linear part carries the fixed-interface and interface bases") {
  const SubFixture f = make_fixture();
  const Manifold& man = f.man();
  const Substructure& sub = f.sub();
  CHECK(man.n_phi == 2);
  CHECK(man.n_chi == 3);
  CHECK(man.L.rows() == sub.n());
  // eta columns: kept modes over the internal rows, zero on the interface
  CHECK((man.L.topLeftCorner(sub.n_u, man.n_phi) - f.fim().shapes).norm() <= 1e-12);
  CHECK(man.L.bottomLeftCorner(sub.n_q, man.n_phi).norm() == 0.0);
  // chi columns: the interface basis on the interface rows
  CHECK((man.L.bottomRightCorner(sub.n_q, man.n_chi) - f.psi()).norm() <= 1e-12);
}

TEST_CASE("quadratic term vanishes on interface rows and is mode-deflated") {
  const SubFixture f = make_fixture();
  const Manifold& man = f.man();
  const Substructure& sub = f.sub();
  CHECK(man.Q.rows() == sub.n());
  CHECK(man.Q.data().bottomRows(sub.n_q).norm() == 0.0);

  const Mat coupling = f.fim().shapes.transpose() *
                       (sub.Muu * man.Q.data().topRows(sub.n_u));
  CHECK(coupling.cwiseAbs().maxCoeff() <= 1e-10 * man.Q.data().cwiseAbs().maxCoeff());
}

TEST_CASE("quadratic pair order enumerates every pair once") {
  const QuadraticPairs qp = quadratic_pair_order(2, 3);
  const int m = 5;
  CHECK(static_cast<int>(qp.xi_pairs.size()) == m * (m + 1) / 2);
  std::vector<std::vector<bool>> seen(m, std::vector<bool>(m, false));
  for (auto [a, b] : qp.xi_pairs) {
    CHECK(!seen[a][b]);
    seen[a][b] = seen[b][a] = true;
  }
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) CHECK(seen[a][b]);
}

TEST_CASE("a model without quadratic element terms gets a zero manifold correction") {
  BeamModel model = fix::flat_beam(16);
  for (ElementTensors& et : model.element_tensors) {
    et.K2e.setZero();
    et.K3e.setZero();
  }
  const GlobalOperators ops = assemble_global(model);
  const Partition part = partition_at(model, ops, {0.06});
  const Substructure& sub = part.subs[0];
  const ModeSet fim = fixed_interface_modes(sub, 2);
  const Manifold man = build_manifold(sub, fim, Mat::Identity(sub.n_q, sub.n_q));
  CHECK(man.Q.data().norm() == 0.0);
}

TEST_CASE("exact quadratic right-hand sides match finite differences") {
  const fix::Reduced exact = fix::reduce(fix::curved_beam(18), {0.6}, 2, true,
                                         QuadraticRhs::Exact);
  const fix::Reduced fd = fix::reduce(fix::curved_beam(18), {0.6}, 2, true,
                                      QuadraticRhs::FiniteDifference);
  for (size_t s = 0; s < exact.manifolds.size(); ++s) {
    const Mat& qe = exact.manifolds[s].Q.data();
    const Mat& qf = fd.manifolds[s].Q.data();
    CHECK((qe - qf).norm() <= 1e-6 * qe.norm());
  }
}

TEST_CASE("map and tangent are consistent") {
  const SubFixture f = make_fixture();
  const Manifold& man = f.man();
  const Vec xi = 1e-4 * fix::test_vector(man.m(), 3);
  const Mat J = man.tangent(xi);
  const double h = 1e-7;
  for (int p = 0; p < man.m(); ++p) {
    Vec xp = xi, xm = xi;
    xp[p] += h;
    xm[p] -= h;
    const Vec fd = (man.map(xp) - man.map(xm)) / (2.0 * h);
    CHECK((J.col(p) - fd).norm() <= 1e-6 * (fd.norm() + 1.0));
  }
}

TEST_CASE("deflated equilibrium residual decays with third order") {
  const SubFixture f = make_fixture();
  const Manifold& man = f.man();
  const Substructure& sub = f.sub();
  const Mat& Phi = f.fim().shapes;
  const Vec dir = probe_direction(man);

  const auto residual = [&](double eps) {
    const Vec d = man.map(Vec(eps * f.red.model.section.thickness * dir));
    const Vec g = internal_force(sub.span, d).head(sub.n_u);
    const Vec r = g - sub.Muu * (Phi * (Phi.transpose() * g));
    return r.norm();
  };
  const double slope =
      verify::scaling_probe(residual, {0.02, 0.04, 0.08, 0.16, 0.32});
  CHECK(slope >= 2.9);
}

TEST_CASE("manifold matches the static-condensation oracle to second order") {
  const SubFixture f = make_fixture(16, 2);
  const Manifold& man = f.man();
  const Substructure& sub = f.sub();
  const Vec dir = probe_direction(man);

  const auto taylor_gap = [&](double eps) {
    const Vec xi = eps * f.red.model.section.thickness * dir;
    const Vec d_man = man.map(xi);
    const Vec u_oracle = verify::static_condensation_oracle(
        sub, f.fim(), f.psi(), xi.head(man.n_phi), xi.tail(man.n_chi));
    return (d_man.head(sub.n_u) - u_oracle).norm();
  };
  const double slope =
      verify::scaling_probe(taylor_gap, {0.02, 0.04, 0.08, 0.16, 0.32});
  CHECK(slope >= 2.9);
}

TEST_CASE("condensation oracle maps zero to zero") {
  const SubFixture f = make_fixture(12, 1);
  const Vec u = verify::static_condensation_oracle(f.sub(), f.fim(), f.psi(),
                                                   Vec::Zero(1), Vec::Zero(3));
  CHECK(u.norm() == 0.0);
}

TEST_CASE("binary dump round-trips exactly") {
  const SubFixture f = make_fixture(14, 2);
  const Manifold& man = f.man();
  const std::string path = "manifold_roundtrip.bin";
  dump_manifold(man, path);
  const Manifold back = load_manifold(path);
  CHECK(back.n_phi == man.n_phi);
  CHECK(back.n_chi == man.n_chi);
  CHECK((back.L - man.L).norm() == 0.0);
  CHECK((back.Q.data() - man.Q.data()).norm() == 0.0);
  std::remove(path.c_str());
}
