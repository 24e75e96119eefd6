// Invariant suites, one named case each so they register as standalone
// ctest targets. Some overlap with module tests is deliberate: these are the
// contract, the module tests are the diagnosis.
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "nlcb/basis.hpp"
#include "nlcb/manifold.hpp"
#include "nlcb/newmark.hpp"
#include "nlcb/rom.hpp"
#include "nlcb/verify.hpp"

using namespace nlcb;

namespace {

Vec q_contract(const Manifold& man, const Vec& x, const Vec& y) {
  Vec out = Vec::Zero(man.L.rows());
  for (int i = 0; i < man.L.rows(); ++i)
    for (int b = 0; b < man.m(); ++b)
      for (int c = 0; c < man.m(); ++c) out[i] += man.Q(i, b, c) * x[b] * y[c];
  return out;
}

Vec unit_peak_direction(const Manifold& man) {
  Vec xi(man.m());
  for (int i = 0; i < man.m(); ++i) xi[i] = 1.0 + 0.2 * i;
  return xi / (man.L * xi).cwiseAbs().maxCoeff();
}

} // namespace

TEST_CASE("span-equivalence") {
  for (const bool curved : {false, true}) {
    const fix::Reduced red =
        fix::reduce(curved ? fix::curved_beam(24) : fix::flat_beam(24), {0.6}, 2);
    for (size_t s = 0; s < red.part.subs.size(); ++s) {
      const Mat cb = cb_basis(red.part.subs[s], red.fims[s], red.sub_psi[s]);
      const Vec angles = principal_angles(cb, red.manifolds[s].L);
      CHECK(angles.maxCoeff() < 1e-8);
    }
  }
}

TEST_CASE("compatibility-null") {
  for (const bool curved : {false, true}) {
    const BeamModel model = curved ? fix::curved_beam(30) : fix::flat_beam(30);
    const GlobalOperators ops = assemble_global(model);
    for (const auto& cuts :
         {std::vector<double>{0.06}, std::vector<double>{0.035, 0.07},
          std::vector<double>{0.02, 0.05, 0.08}}) {
      const Partition part = partition_at(model, ops, cuts);
      SpMat sum;
      for (size_t s = 0; s < part.subs.size(); ++s) {
        const SpMat term = part.B[s] * part.L[s];
        sum = s == 0 ? term : SpMat(sum + term);
      }
      CHECK(sum.norm() == 0.0);
    }
  }
}

TEST_CASE("gradient-consistency") {
  const fix::Reduced red = fix::reduce(fix::curved_beam(20), {0.6}, 2);
  const ReducedModel& m = red.rom.model;
  for (unsigned trial = 0; trial < 3; ++trial) {
    Vec xi = fix::test_vector(m.m, 200 + trial);
    double peak = 0.0;
    for (size_t s = 0; s < red.part.subs.size(); ++s)
      peak = std::max(peak, red.manifolds[s].map(m.localize(xi, static_cast<int>(s)))
                                .cwiseAbs()
                                .maxCoeff());
    xi *= 0.5 * red.model.section.thickness / peak;

    const Vec f = m.force(xi);
    const double h = 5e-4 * xi.cwiseAbs().maxCoeff();
    Vec grad(m.m);
    for (int p = 0; p < m.m; ++p) {
      const auto val = [&](double step) {
        Vec x = xi;
        x[p] += step;
        return m.potential(x);
      };
      grad[p] = (-val(2 * h) + 8 * val(h) - 8 * val(-h) + val(-2 * h)) / (12 * h);
    }
    CHECK((grad - f).norm() <= 1e-9 * f.norm());
  }
}

TEST_CASE("truncation-order") {
  const fix::Reduced red = fix::reduce(fix::flat_beam(16), {0.6}, 2);
  for (size_t s = 0; s < red.part.subs.size(); ++s) {
    const Substructure& sub = red.part.subs[s];
    const Manifold& man = red.manifolds[s];
    const SubstructureRom& rom = red.roms[s];

    const Vec dir = unit_peak_direction(man);
    const auto gap = [&](double eps) {
      const Vec xi = eps * red.model.section.thickness * dir;
      const Vec fr = rom.Kr * xi + rom.K2r.contract2(xi, xi) + rom.K3r.contract3(xi, xi, xi);
      const Vec ff = man.L.transpose() * internal_force(sub.span, man.map(xi));
      return (fr - ff).norm();
    };
    CHECK(verify::scaling_probe(gap, {0.05, 0.1, 0.2, 0.4}) >= 3.9);

    const Mat lkq = man.L.transpose() * (sub.K * man.Q.data());
    const double scale = (man.L.transpose() * sub.K).norm() * man.Q.data().norm();
    CHECK(lkq.norm() <= 1e-10 * scale);
  }
}

TEST_CASE("projection-equivalence") {
  const fix::Reduced red = fix::reduce(fix::curved_beam(14), {0.6}, 2);
  for (size_t s = 0; s < red.part.subs.size(); ++s) {
    const Substructure& sub = red.part.subs[s];
    const Manifold& man = red.manifolds[s];
    const SubstructureRom& rom = red.roms[s];
    REQUIRE(sub.n() <= 50);
    const verify::GlobalTensors gt = verify::global_tensor_oracle(sub.span);
    for (unsigned trial = 0; trial < 5; ++trial) {
      const Vec xi = fix::test_vector(man.m(), 300 + trial);
      const Vec l = man.L * xi;
      const Vec q = q_contract(man, xi, xi);
      const Vec c2 = man.L.transpose() * Vec(gt.K2.contract2(l, l) + sub.K * q);
      const Vec c3 = man.L.transpose() * Vec(gt.K2.contract2(l, q) + gt.K2.contract2(q, l) +
                                             gt.K3.contract3(l, l, l));
      CHECK((rom.K2r.contract2(xi, xi) - c2).norm() <= 1e-10 * c2.norm());
      CHECK((rom.K3r.contract3(xi, xi, xi) - c3).norm() <= 1e-10 * c3.norm());
    }
  }
}

TEST_CASE("manifold-taylor") {
  const fix::Reduced red = fix::reduce(fix::flat_beam(16), {0.6}, 2);
  const Substructure& sub = red.part.subs[0];
  const Manifold& man = red.manifolds[0];
  const Vec dir = unit_peak_direction(man);
  const auto gap = [&](double eps) {
    const Vec xi = eps * red.model.section.thickness * dir;
    const Vec u = verify::static_condensation_oracle(sub, red.fims[0], red.sub_psi[0],
                                                     xi.head(man.n_phi), xi.tail(man.n_chi));
    return (man.map(xi).head(sub.n_u) - u).norm();
  };
  CHECK(verify::scaling_probe(gap, {0.02, 0.04, 0.08, 0.16, 0.32}) >= 2.9);
}

TEST_CASE("rhs-exact-vs-fd") {
  for (const bool curved : {false, true}) {
    const BeamModel model = curved ? fix::curved_beam(18) : fix::flat_beam(18);
    const GlobalOperators ops = assemble_global(model);
    const Partition part = partition_at(model, ops, {0.06});
    const Substructure& sub = part.subs[0];
    const ModeSet fim = fixed_interface_modes(sub, 2);
    const Mat Psi = Mat::Identity(sub.n_q, sub.n_q);

    ManifoldOptions exact, fd;
    exact.rhs = QuadraticRhs::Exact;
    fd.rhs = QuadraticRhs::FiniteDifference;
    fd.fd_step = 1e-7 * model.section.thickness;
    const Mat W = manifold_linear_part(sub, fim.shapes, Psi);
    const Mat re = quadratic_rhs(sub, fim.shapes, W, exact);
    const Mat rf = quadratic_rhs(sub, fim.shapes, W, fd);
    CHECK((re - rf).norm() <= 1e-6 * re.norm());
  }
}

TEST_CASE("energy-drift") {
  const fix::Reduced red = fix::reduce(fix::flat_beam(20, 0.0, 0.0), {0.6}, 1);
  const ReducedModel& m = red.rom.model;
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> ges(m.Kr, m.Mr);
  const double f1 = std::sqrt(ges.eigenvalues()[0]) / (2.0 * EIGEN_PI);
  Vec xi0 = ges.eigenvectors().col(0);
  double peak = 0.0;
  for (size_t s = 0; s < red.part.subs.size(); ++s)
    peak = std::max(peak, red.manifolds[s].map(m.localize(xi0, static_cast<int>(s)))
                              .cwiseAbs()
                              .maxCoeff());
  xi0 *= 0.25 * red.model.section.thickness / peak;

  RomSystem sys(m, [&](double) { return Vec::Zero(m.m); });
  NewmarkConfig cfg;
  cfg.dt = 1.0 / (60.0 * f1);
  cfg.n_steps = 600;
  cfg.newton_tol = 1e-12;
  const TimeHistory h = integrate(sys, xi0, Vec::Zero(m.m), cfg);
  const double e0 = sys.potential(h.x.col(0)) + sys.kinetic(h.v.col(0));
  REQUIRE(e0 > 0.0);
  for (Eigen::Index k = 0; k < h.times.size(); ++k) {
    const double e = sys.potential(h.x.col(k)) + sys.kinetic(h.v.col(k));
    CHECK(std::abs(e - e0) / e0 < 1e-4);
  }
}
