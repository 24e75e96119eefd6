#include "nlcb/basis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

namespace nlcb {

namespace {

// Sign convention: the first entry within a tie band of the largest
// magnitude is made positive. Symmetric shapes carry +- pairs of equal
// magnitude, so a bare argmax would flip with roundoff.
void fix_signs(Mat& shapes) {
  for (int c = 0; c < shapes.cols(); ++c) {
    const double cap = (1.0 - 1e-9) * shapes.col(c).cwiseAbs().maxCoeff();
    for (int i = 0; i < shapes.rows(); ++i) {
      if (std::abs(shapes(i, c)) >= cap) {
        if (shapes(i, c) < 0.0) shapes.col(c) *= -1.0;
        break;
      }
    }
  }
}

ModeSet dense_modes(const Mat& K, const Mat& M, int n_modes) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(K, M);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("solve_modes: dense generalized eigensolver failed");
  ModeSet out;
  out.shapes = es.eigenvectors().leftCols(n_modes); // B-normalized, ascending
  Vec ev = es.eigenvalues().head(n_modes);
  for (int i = 0; i < n_modes; ++i)
    if (ev[i] < -1e-8 * std::abs(ev[n_modes - 1]))
      throw std::runtime_error("solve_modes: negative eigenvalue, stiffness not PSD");
  out.omega = ev.cwiseMax(0.0).cwiseSqrt();
  fix_signs(out.shapes);
  return out;
}

// Shift-invert block subspace iteration with M-orthonormalization and a
// Rayleigh-Ritz wrap-up; residual-checked.
ModeSet iterated_modes(const SpMat& K, const SpMat& M, int n_modes) {
  const int n = static_cast<int>(K.rows());
  const int m = std::min(n, 2 * n_modes + 8);
  const double sigma = 0.0; // lowest modes of an SPD pencil
  Eigen::SimplicialLDLT<SpMat> solver(K - sigma * M);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("solve_modes: factorization failed in shift-invert");

  Mat X = Mat::Random(n, m); // deterministic under Eigen's default seed
  const auto m_orthonormalize = [&](Mat& V) {
    for (int c = 0; c < V.cols(); ++c) {
      for (int r = 0; r < c; ++r) V.col(c) -= (V.col(r).dot(M * V.col(c))) * V.col(r);
      const double nrm = std::sqrt(V.col(c).dot(M * V.col(c)));
      if (nrm <= 0.0) throw std::runtime_error("solve_modes: degenerate subspace");
      V.col(c) /= nrm;
    }
  };

  ModeSet out;
  double resid = 1.0, prev = 1.0;
  int stalled = 0;
  for (int it = 0; it < 200; ++it) {
    X = solver.solve(M * X);
    m_orthonormalize(X);
    const Mat Kr = X.transpose() * (K * X).eval();
    Eigen::SelfAdjointEigenSolver<Mat> es(Kr);
    X = X * es.eigenvectors();
    out.shapes = X.leftCols(n_modes);
    out.omega = es.eigenvalues().head(n_modes).cwiseMax(0.0).cwiseSqrt();
    resid = 0.0;
    for (int c = 0; c < n_modes; ++c) {
      const Vec r = K * out.shapes.col(c) -
                    (out.omega[c] * out.omega[c]) * (M * out.shapes.col(c));
      resid = std::max(resid, r.norm() / std::max(1e-300, (K * out.shapes.col(c)).norm()));
    }
    if (resid < 1e-10) break;
    // ill-conditioned pencils floor above 1e-10; accept the floor once the
    // iteration stops making progress, as long as it is still a tight solve
    stalled = resid > 0.5 * prev ? stalled + 1 : 0;
    prev = resid;
    if (stalled >= 3 && resid < 1e-6) break;
  }
  if (resid >= 1e-6)
    throw std::runtime_error("solve_modes: shift-invert iteration did not converge, residual " +
                             std::to_string(resid));
  fix_signs(out.shapes);
  return out;
}

} // namespace

ModeSet solve_modes(const SpMat& K, const SpMat& M, int n_modes, int dense_limit) {
  const int n = static_cast<int>(K.rows());
  if (n_modes < 1 || n_modes > n) throw std::invalid_argument("solve_modes: bad mode count");
  if (K.rows() != K.cols() || M.rows() != M.cols() || K.rows() != M.rows())
    throw std::invalid_argument("solve_modes: shape mismatch");
  if (n <= dense_limit) return dense_modes(Mat(K), Mat(M), n_modes);
  return iterated_modes(K, M, n_modes);
}

ModeSet fixed_interface_modes(const Substructure& sub, int n_modes) {
  if (n_modes < 1 || n_modes > sub.n_u)
    throw std::invalid_argument("fixed_interface_modes: bad mode count");
  return solve_modes(sub.Kuu, sub.Muu, n_modes);
}

Mat static_modes(const SpMat& Kuu, const SpMat& Kuq) {
  Eigen::SimplicialLLT<SpMat> llt(Kuu);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("static_modes: Kuu is not SPD (free rigid modes with clamped interface?)");
  return -llt.solve(Mat(Kuq));
}

Mat virtual_node_basis(const std::vector<Node>& iface_nodes) {
  const int nn = static_cast<int>(iface_nodes.size());
  if (nn < 1) throw std::invalid_argument("virtual_node_basis: empty interface");
  const int n = 3 * nn;
  double xc = 0.0, zc = 0.0;
  for (const auto& nd : iface_nodes) {
    xc += nd.x;
    zc += nd.z;
  }
  xc /= nn;
  zc /= nn;

  Mat psi = Mat::Zero(n, 3);
  for (int i = 0; i < nn; ++i) {
    psi(3 * i + 0, 0) = 1.0;                    // rigid x translation
    psi(3 * i + 1, 1) = 1.0;                    // rigid z translation
    psi(3 * i + 0, 2) = iface_nodes[i].z - zc;  // rotation about the centroid:
    psi(3 * i + 1, 2) = -(iface_nodes[i].x - xc); // w = -theta (x - xc)
    psi(3 * i + 2, 2) = -1.0;
  }
  // orthonormalize; translations are already orthogonal to each other
  Eigen::HouseholderQR<Mat> qr(psi);
  Mat q = qr.householderQ() * Mat::Identity(n, 3);
  fix_signs(q);
  return q;
}

Vec principal_angles(const Mat& A, const Mat& B) {
  if (A.rows() != B.rows()) throw std::invalid_argument("principal_angles: row mismatch");
  const auto orth = [](const Mat& X) {
    Eigen::HouseholderQR<Mat> qr(X);
    return Mat(qr.householderQ() * Mat::Identity(X.rows(), X.cols()));
  };
  const Mat Qa = orth(A), Qb = orth(B);
  // sines of the angles: singular values of (I - Qa Qa^T) Qb
  const Mat R = Qb - Qa * (Qa.transpose() * Qb);
  Eigen::JacobiSVD<Mat> svd(R);
  Vec s = svd.singularValues();
  Vec angles(s.size());
  for (int i = 0; i < s.size(); ++i) angles[i] = std::asin(std::min(1.0, std::max(0.0, s[i])));
  std::sort(angles.data(), angles.data() + angles.size());
  return angles;
}

} // namespace nlcb
