#include "nlcb/manifold.hpp"

#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>

#include <Eigen/SparseCholesky>

#include "nlcb/kernels.hpp"

namespace nlcb {

Vec Manifold::map(const Vec& xi) const {
  Vec d = L * xi;
  d += Q.contract2(xi, xi);
  return d;
}

Mat Manifold::tangent(const Vec& xi) const { return L + 2.0 * Q.contract1(xi); }

QuadraticPairs quadratic_pair_order(int n_phi, int n_chi) {
  QuadraticPairs p;
  for (int i = 0; i < n_phi; ++i)
    for (int j = i; j < n_phi; ++j) p.xi_pairs.push_back({i, j});
  for (int i = 0; i < n_chi; ++i)
    for (int j = i; j < n_chi; ++j) p.xi_pairs.push_back({n_phi + i, n_phi + j});
  for (int i = 0; i < n_phi; ++i)
    for (int j = 0; j < n_chi; ++j) p.xi_pairs.push_back({i, n_phi + j});
  return p;
}

namespace {

// deflators: on solutions X -> (I - Phi Phi^T Muu) X, on residuals the
// transpose projector (I - Muu Phi Phi^T)
Mat deflate_solution(const Mat& X, const Mat& Phi, const SpMat& Muu) {
  return X - Phi * (Phi.transpose() * (Muu * X));
}

Mat deflate_residual(const Mat& R, const Mat& Phi, const SpMat& Muu) {
  return R - Muu * (Phi * (Phi.transpose() * R));
}

} // namespace

Mat manifold_linear_part(const Substructure& sub, const Mat& Phi, const Mat& Psi,
                         double residual_tol) {
  const int n_phi = static_cast<int>(Phi.cols());
  const int n_chi = static_cast<int>(Psi.cols());
  if (Psi.rows() != sub.n_q) throw std::invalid_argument("manifold: Psi row mismatch");
  Mat L = Mat::Zero(sub.n(), n_phi + n_chi);
  L.topLeftCorner(sub.n_u, n_phi) = Phi;
  if (n_chi > 0) {
    Eigen::SimplicialLLT<SpMat> llt(sub.Kuu);
    if (llt.info() != Eigen::Success) throw std::runtime_error("manifold: Kuu not SPD");
    const Mat KuqPsi = sub.Kuq * Psi;
    const Mat Bhat = deflate_solution(-llt.solve(KuqPsi), Phi, sub.Muu);
    const Mat resid = deflate_residual(sub.Kuu * Bhat + KuqPsi, Phi, sub.Muu);
    const double rel = resid.norm() / std::max(KuqPsi.norm(), 1e-300);
    if (rel > residual_tol)
      throw std::runtime_error("manifold: constraint-mode residual " + std::to_string(rel));
    L.block(0, n_phi, sub.n_u, n_chi) = Bhat;
    L.bottomRightCorner(sub.n_q, n_chi) = Psi;
  }
  return L;
}

Mat quadratic_rhs(const Substructure& sub, const Mat& Phi, const Mat& W,
                  const ManifoldOptions& opt) {
  const int n_phi = static_cast<int>(Phi.cols());
  const int n_chi = static_cast<int>(W.cols());
  const auto pairs = quadratic_pair_order(n_phi, n_chi);
  const int ncols = static_cast<int>(pairs.xi_pairs.size());

  // full-substructure direction of xi-coordinate a
  const auto column = [&](int a) -> Vec {
    Vec v = Vec::Zero(sub.n());
    if (a < n_phi)
      v.head(sub.n_u) = Phi.col(a);
    else
      v = W.col(a - n_phi);
    return v;
  };

  Mat F(sub.n_u, ncols);
  const bool fd = opt.rhs == QuadraticRhs::FiniteDifference;
  if (fd && !(opt.fd_step > 0.0))
    throw std::invalid_argument("quadratic_rhs: finite-difference step not set");

#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (opt.exec == Exec::Parallel)
#endif
  for (int c = 0; c < ncols; ++c) {
    const auto [a, b] = pairs.xi_pairs[c];
    const Vec v = column(a);
    const Vec w = column(b);
    const Vec h = fd ? tangent_derivative_fd(sub.span, v, w, opt.fd_step)
                     : tangent_derivative_apply(sub.span, v, w);
    const double scale = (a == b) ? -0.5 : -1.0;
    F.col(c) = scale * h.head(sub.n_u);
  }
  return F;
}

Manifold build_manifold(const Substructure& sub, const ModeSet& fim, const Mat& Psi,
                        const ManifoldOptions& opt) {
  Manifold man;
  man.n_phi = static_cast<int>(fim.shapes.cols());
  man.n_chi = static_cast<int>(Psi.cols());
  man.L = manifold_linear_part(sub, fim.shapes, Psi, opt.residual_tol);

  const int m = man.m();
  man.Q = SymTensor3(sub.n(), m);

  const Mat W = man.L.rightCols(man.n_chi);
  const Mat F = quadratic_rhs(sub, fim.shapes, W, opt);

  Eigen::SimplicialLLT<SpMat> llt(sub.Kuu);
  if (llt.info() != Eigen::Success) throw std::runtime_error("manifold: Kuu not SPD");
  Mat X = llt.solve(F);
  X = deflate_solution(X, fim.shapes, sub.Muu);
  {
    const Mat resid = deflate_residual(sub.Kuu * X - F, fim.shapes, sub.Muu);
    const double rel = resid.norm() / std::max(F.norm(), 1e-300);
    if (rel > opt.residual_tol)
      throw std::runtime_error("manifold: quadratic-solve residual " + std::to_string(rel));
  }

  const auto pairs = quadratic_pair_order(man.n_phi, man.n_chi);
  for (size_t c = 0; c < pairs.xi_pairs.size(); ++c) {
    const auto [a, b] = pairs.xi_pairs[c];
    const double w = (a == b) ? 1.0 : 0.5;
    const int p = SymTensor3::pair_index(a, b, m);
    man.Q.data().col(p).head(sub.n_u) = w * X.col(static_cast<int>(c));
  }
  return man;
}

void dump_manifold(const Manifold& man, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("dump_manifold: cannot open " + path);
  const uint32_t hdr[4] = {static_cast<uint32_t>(man.L.rows()), static_cast<uint32_t>(man.m()),
                           static_cast<uint32_t>(man.n_phi), static_cast<uint32_t>(man.n_chi)};
  out.write(reinterpret_cast<const char*>(hdr), sizeof(hdr));
  out.write(reinterpret_cast<const char*>(man.L.data()),
            static_cast<std::streamsize>(sizeof(double) * man.L.size()));
  out.write(reinterpret_cast<const char*>(man.Q.data().data()),
            static_cast<std::streamsize>(sizeof(double) * man.Q.data().size()));
  if (!out) throw std::runtime_error("dump_manifold: write failed");
}

Manifold load_manifold(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_manifold: cannot open " + path);
  uint32_t hdr[4];
  in.read(reinterpret_cast<char*>(hdr), sizeof(hdr));
  Manifold man;
  const int n = static_cast<int>(hdr[0]), m = static_cast<int>(hdr[1]);
  man.n_phi = static_cast<int>(hdr[2]);
  man.n_chi = static_cast<int>(hdr[3]);
  if (man.n_phi + man.n_chi != m) throw std::runtime_error("load_manifold: bad header");
  man.L.resize(n, m);
  man.Q = SymTensor3(n, m);
  in.read(reinterpret_cast<char*>(man.L.data()),
          static_cast<std::streamsize>(sizeof(double) * man.L.size()));
  in.read(reinterpret_cast<char*>(man.Q.data().data()),
          static_cast<std::streamsize>(sizeof(double) * man.Q.data().size()));
  if (!in) throw std::runtime_error("load_manifold: truncated file");
  return man;
}

} // namespace nlcb
