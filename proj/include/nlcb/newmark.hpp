#pragma once

#include <functional>
#include <memory>
#include <vector>

#include <Eigen/SparseCholesky>

#include "nlcb/kernels.hpp"
#include "nlcb/rom.hpp"
#include "nlcb/types.hpp"

namespace nlcb {

/// What the implicit integrator needs from a model: forces, mass/damping
/// applications, and a factor-and-solve of the Newton iteration matrix
/// S = cm M + cd D + K_t(x).
class SecondOrderSystem {
public:
  virtual ~SecondOrderSystem() = default;
  virtual int dim() const = 0;
  virtual Vec internal_force(const Vec& x) const = 0;
  virtual Vec external_force(double t) const = 0;
  virtual Vec apply_mass(const Vec& v) const = 0;
  virtual Vec apply_damping(const Vec& v) const = 0;
  virtual Vec solve_mass(const Vec& r) const = 0;
  virtual void prepare(const Vec& x, double cm, double cd) = 0;
  virtual Vec solve(const Vec& r) const = 0;
  virtual double kinetic(const Vec& v) const = 0;
  virtual double potential(const Vec& x) const = 0;
};

using LoadFunction = std::function<Vec(double)>;

/// Full-order system over an element span. With linearized = true the
/// internal force is frozen at the origin tangent, and the factorization is
/// reused across steps.
class FullSystem : public SecondOrderSystem {
public:
  FullSystem(const ElementSpan& span, SpMat M, SpMat D, LoadFunction load, bool linearized,
             Exec exec = Exec::Serial);

  int dim() const override { return span_.ndof; }
  Vec internal_force(const Vec& x) const override;
  Vec external_force(double t) const override { return load_(t); }
  Vec apply_mass(const Vec& v) const override { return M_ * v; }
  Vec apply_damping(const Vec& v) const override { return D_ * v; }
  Vec solve_mass(const Vec& r) const override;
  void prepare(const Vec& x, double cm, double cd) override;
  Vec solve(const Vec& r) const override;
  double kinetic(const Vec& v) const override { return 0.5 * v.dot(M_ * v); }
  double potential(const Vec& x) const override;

private:
  ElementSpan span_;
  SpMat M_, D_, K0_;
  LoadFunction load_;
  bool linearized_;
  Exec exec_;
  Eigen::SimplicialLDLT<SpMat> iter_;
  Eigen::SimplicialLDLT<SpMat> mass_;
  bool iter_ready_ = false;
  double cm_ = 0.0, cd_ = 0.0;
};

/// Reduced system over an assembled ROM. Dense, unsymmetric iteration matrix
/// (the cross part of the cubic tensor is only trailing-symmetric).
class RomSystem : public SecondOrderSystem {
public:
  RomSystem(const ReducedModel& model, LoadFunction reduced_load);

  int dim() const override { return model_.m; }
  Vec internal_force(const Vec& x) const override { return model_.force(x); }
  Vec external_force(double t) const override { return load_(t); }
  Vec apply_mass(const Vec& v) const override { return model_.Mr * v; }
  Vec apply_damping(const Vec& v) const override { return model_.Dr * v; }
  Vec solve_mass(const Vec& r) const override { return mass_.solve(r); }
  void prepare(const Vec& x, double cm, double cd) override;
  Vec solve(const Vec& r) const override { return iter_.solve(r); }
  double kinetic(const Vec& v) const override { return model_.kinetic(v); }
  double potential(const Vec& x) const override { return model_.potential(x); }

private:
  const ReducedModel& model_;
  LoadFunction load_;
  Eigen::LLT<Mat> mass_;
  Eigen::PartialPivLU<Mat> iter_;
};

struct NewmarkConfig {
  double dt = 0.0;
  int n_steps = 0;
  double gamma = 0.5;
  double beta = 0.25;
  double newton_tol = 1e-6; // relative residual
  int max_iter = 20;
};

/// Per-step discrete power balance
///   dT + dx.f_int_avg + dx.D v_avg - dx.f_ext_avg,
/// an exact identity of the average-acceleration scheme up to the Newton
/// residual; rel is the balance over the largest participating term.
struct EnergyAudit {
  std::vector<double> t, dT, w_int, w_damp, w_ext, balance, rel;
  double max_rel = 0.0;
};

struct TimeHistory {
  Vec times;   // n_steps + 1
  Mat x, v, a; // dim x (n_steps + 1)
  std::vector<int> iters;
  EnergyAudit audit;
};

/// Newmark-beta with Newton iterations; throws on divergence or non-finite
/// residuals. The initial acceleration is solved from the equation of motion.
TimeHistory integrate(SecondOrderSystem& sys, const Vec& x0, const Vec& v0,
                      const NewmarkConfig& cfg);

} // namespace nlcb
