#include "nlcb/newmark.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace nlcb {

FullSystem::FullSystem(const ElementSpan& span, SpMat M, SpMat D, LoadFunction load,
                       bool linearized, Exec exec)
    : span_(span), M_(std::move(M)), D_(std::move(D)), load_(std::move(load)),
      linearized_(linearized), exec_(exec) {
  if (!load_) throw std::invalid_argument("FullSystem: load function required");
  mass_.compute(M_);
  if (mass_.info() != Eigen::Success)
    throw std::runtime_error("FullSystem: mass factorization failed");
  if (linearized_) K0_ = tangent_stiffness(span_, Vec::Zero(span_.ndof), exec_);
}

Vec FullSystem::internal_force(const Vec& x) const {
  return linearized_ ? Vec(K0_ * x) : nlcb::internal_force(span_, x, exec_);
}

Vec FullSystem::solve_mass(const Vec& r) const { return mass_.solve(r); }

void FullSystem::prepare(const Vec& x, double cm, double cd) {
  if (linearized_ && iter_ready_ && cm == cm_ && cd == cd_) return;
  const SpMat Kt = linearized_ ? K0_ : tangent_stiffness(span_, x, exec_);
  SpMat S = Kt;
  S += cm * M_;
  S += cd * D_;
  iter_.compute(S);
  if (iter_.info() != Eigen::Success)
    throw std::runtime_error("FullSystem: iteration matrix factorization failed");
  iter_ready_ = true;
  cm_ = cm;
  cd_ = cd;
}

Vec FullSystem::solve(const Vec& r) const { return iter_.solve(r); }

double FullSystem::potential(const Vec& x) const {
  return linearized_ ? 0.5 * x.dot(K0_ * x) : strain_energy(span_, x);
}

RomSystem::RomSystem(const ReducedModel& model, LoadFunction reduced_load)
    : model_(model), load_(std::move(reduced_load)) {
  if (!load_) throw std::invalid_argument("RomSystem: load function required");
  mass_.compute(model_.Mr);
  if (mass_.info() != Eigen::Success)
    throw std::runtime_error("RomSystem: reduced mass not positive definite");
}

void RomSystem::prepare(const Vec& x, double cm, double cd) {
  Mat S = cm * model_.Mr + cd * model_.Dr + model_.jacobian(x);
  iter_.compute(S);
}

TimeHistory integrate(SecondOrderSystem& sys, const Vec& x0, const Vec& v0,
                      const NewmarkConfig& cfg) {
  const int n = sys.dim();
  if (x0.size() != n || v0.size() != n)
    throw std::invalid_argument("integrate: initial state size mismatch");
  if (!(cfg.dt > 0.0) || cfg.n_steps < 0 || !(cfg.beta > 0.0))
    throw std::invalid_argument("integrate: invalid time-stepping parameters");

  const double dt = cfg.dt;
  const double c0 = 1.0 / (cfg.beta * dt * dt);
  const double c1 = cfg.gamma / (cfg.beta * dt);
  const double c2 = 1.0 / (cfg.beta * dt);
  const double c3 = 0.5 / cfg.beta - 1.0;
  const double c4 = 1.0 - cfg.gamma / cfg.beta;
  const double c5 = dt * (1.0 - 0.5 * cfg.gamma / cfg.beta);

  TimeHistory h;
  h.times = Vec::Zero(cfg.n_steps + 1);
  h.x = Mat::Zero(n, cfg.n_steps + 1);
  h.v = Mat::Zero(n, cfg.n_steps + 1);
  h.a = Mat::Zero(n, cfg.n_steps + 1);
  h.iters.reserve(cfg.n_steps);
  auto& au = h.audit;
  au.t.reserve(cfg.n_steps);
  au.dT.reserve(cfg.n_steps);
  au.w_int.reserve(cfg.n_steps);
  au.w_damp.reserve(cfg.n_steps);
  au.w_ext.reserve(cfg.n_steps);
  au.balance.reserve(cfg.n_steps);
  au.rel.reserve(cfg.n_steps);

  Vec x = x0, v = v0;
  Vec fext = sys.external_force(0.0);
  Vec fint = sys.internal_force(x);
  Vec a = sys.solve_mass(fext - sys.apply_damping(v) - fint);
  h.x.col(0) = x;
  h.v.col(0) = v;
  h.a.col(0) = a;

  for (int k = 0; k < cfg.n_steps; ++k) {
    const double t1 = (k + 1) * dt;
    const Vec fext1 = sys.external_force(t1);

    // Constant-displacement predictor.
    Vec x1 = x;
    Vec a1 = -c2 * v - c3 * a;
    Vec v1 = c4 * v + c5 * a;
    Vec fint1 = sys.internal_force(x1);
    Vec r = fext1 - sys.apply_mass(a1) - sys.apply_damping(v1) - fint1;
    double ref = std::max({fext1.norm(), fint1.norm(), sys.apply_mass(a1).norm(),
                           sys.apply_damping(v1).norm()});

    int it = 0;
    while (true) {
      if (!r.allFinite()) {
        std::ostringstream msg;
        msg << "integrate: non-finite residual at step " << k + 1;
        throw std::runtime_error(msg.str());
      }
      if (r.norm() <= cfg.newton_tol * ref) break;
      if (it >= cfg.max_iter) {
        std::ostringstream msg;
        msg << "integrate: Newton stalled at step " << k + 1 << ", residual " << r.norm()
            << ", reference " << ref;
        throw std::runtime_error(msg.str());
      }
      sys.prepare(x1, c0, c1);
      x1 += sys.solve(r);
      a1 = c0 * (x1 - x) - c2 * v - c3 * a;
      v1 = c1 * (x1 - x) + c4 * v + c5 * a;
      fint1 = sys.internal_force(x1);
      r = fext1 - sys.apply_mass(a1) - sys.apply_damping(v1) - fint1;
      ref = std::max({ref, fint1.norm()});
      ++it;
    }

    // Discrete power balance of the converged step.
    const Vec dx = x1 - x;
    const double dT = sys.kinetic(v1) - sys.kinetic(v);
    const double w_int = dx.dot(0.5 * (fint + fint1));
    const double w_damp = dx.dot(sys.apply_damping(0.5 * (v + v1)));
    const double w_ext = dx.dot(0.5 * (fext + fext1));
    const double bal = dT + w_int + w_damp - w_ext;
    const double scale =
        std::max({std::abs(dT), std::abs(w_int), std::abs(w_damp), std::abs(w_ext)});
    const double rel = scale > 0.0 ? std::abs(bal) / scale : 0.0;
    au.t.push_back(t1);
    au.dT.push_back(dT);
    au.w_int.push_back(w_int);
    au.w_damp.push_back(w_damp);
    au.w_ext.push_back(w_ext);
    au.balance.push_back(bal);
    au.rel.push_back(rel);
    au.max_rel = std::max(au.max_rel, rel);

    x = x1;
    v = v1;
    a = a1;
    fint = fint1;
    fext = fext1;
    h.times[k + 1] = t1;
    h.x.col(k + 1) = x;
    h.v.col(k + 1) = v;
    h.a.col(k + 1) = a;
    h.iters.push_back(it);
  }
  return h;
}

} // namespace nlcb
