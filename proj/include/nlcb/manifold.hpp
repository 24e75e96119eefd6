#pragma once

#include <string>

#include "nlcb/basis.hpp"
#include "nlcb/partition.hpp"
#include "nlcb/tensor.hpp"
#include "nlcb/types.hpp"

namespace nlcb {

/// Quadratic configuration manifold of one substructure,
///   d = Gamma(xi) = L xi + Q:(xi (x) xi),   xi = [eta; chi].
/// The linear part stacks fixed-interface modes and deflated constraint
/// modes over the interface basis; Q carries the second-order correction of
/// the slaved internal content and is exactly zero on interface rows.
struct Manifold {
  Mat L;        // n x m
  SymTensor3 Q; // n x m x m, trailing-symmetric packed
  int n_phi = 0;
  int n_chi = 0;
  int m() const { return n_phi + n_chi; }

  /// d = L xi + Q:(xi,xi)
  Vec map(const Vec& xi) const;
  /// dGamma/dxi = L + 2 Q.xi
  Mat tangent(const Vec& xi) const;
};

enum class QuadraticRhs { Exact, FiniteDifference };

struct ManifoldOptions {
  QuadraticRhs rhs = QuadraticRhs::Exact;
  double fd_step = 0.0;           // required when rhs = FiniteDifference
  double residual_tol = 1e-8;     // deflated-solve postcondition
  Exec exec = Exec::Serial;
};

/// Pair ordering of the quadratic columns: eta_i eta_j (i<=j), then
/// chi_i chi_j (i<=j), then eta_i chi_j (all pairs). Column (a,b) of the
/// packed Q stores the halved off-diagonal coefficient so Q:(xi,xi)
/// reproduces the monomial sum.
struct QuadraticPairs {
  std::vector<std::pair<int, int>> xi_pairs; // indices into xi
};
QuadraticPairs quadratic_pair_order(int n_phi, int n_chi);

/// Linear part [Phi, Phi_hat B_hat; 0, Psi] with the constraint-mode
/// correction deflated against the kept modes; throws if the deflated
/// residual exceeds options.residual_tol (relative).
Mat manifold_linear_part(const Substructure& sub, const Mat& Phi, const Mat& Psi,
                         double residual_tol = 1e-8);

/// Right-hand sides of the second-order equations, one column per pair, built
/// from directional tangent-stiffness derivatives at the origin.
Mat quadratic_rhs(const Substructure& sub, const Mat& Phi, const Mat& W,
                  const ManifoldOptions& opt);

/// Full construction: linear part, quadratic solves (one Cholesky of Kuu
/// reused across all right-hand sides), deflation, scatter into Q.
Manifold build_manifold(const Substructure& sub, const ModeSet& fim, const Mat& Psi,
                        const ManifoldOptions& opt = {});

/// Little-endian binary dump: uint32 n, m, n_phi, n_chi; L column-major; Q
/// packed trailing pairs column-major.
void dump_manifold(const Manifold& man, const std::string& path);
Manifold load_manifold(const std::string& path);

} // namespace nlcb
