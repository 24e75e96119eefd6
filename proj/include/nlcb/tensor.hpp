#pragma once

#include <array>
#include <utility>
#include <vector>

#include "nlcb/types.hpp"

namespace nlcb {

/// Third-order tensor T(i,j,k), symmetric in the trailing pair (j,k).
/// Storage is packed over j <= k; contractions symmetrize on the fly.
class SymTensor3 {
public:
  SymTensor3() = default;
  SymTensor3(int rows, int dim);

  int rows() const { return rows_; }
  int dim() const { return dim_; }
  int pairs() const { return static_cast<int>(jk_.size()); }
  bool empty() const { return rows_ == 0 || dim_ == 0; }

  static int pair_index(int j, int k, int dim); // j <= k after sorting
  double operator()(int i, int j, int k) const;
  void add(int i, int j, int k, double v);

  /// Packed data, rows x pairs; column p holds T(:, j_p, k_p).
  Mat& data() { return a_; }
  const Mat& data() const { return a_; }
  const std::vector<std::pair<int, int>>& pair_list() const { return jk_; }

  /// r_i = sum_jk T_ijk x_j y_k
  Vec contract2(const Vec& x, const Vec& y) const;
  /// J_ip = sum_k T_ipk x_k
  Mat contract1(const Vec& x) const;

  void setZero();
  SymTensor3& operator+=(const SymTensor3& o);
  SymTensor3& operator*=(double s);

private:
  int rows_ = 0, dim_ = 0;
  Mat a_; // rows x npairs
  std::vector<std::pair<int, int>> jk_;
};

/// Fourth-order tensor T(i,j,k,l), symmetric under any permutation of the
/// trailing triple (j,k,l); packed over j <= k <= l.
class SymTensor4 {
public:
  SymTensor4() = default;
  SymTensor4(int rows, int dim);

  int rows() const { return rows_; }
  int dim() const { return dim_; }
  int triples() const { return static_cast<int>(jkl_.size()); }
  bool empty() const { return rows_ == 0 || dim_ == 0; }

  static int triple_index(int j, int k, int l, int dim);
  double operator()(int i, int j, int k, int l) const;
  void add(int i, int j, int k, int l, double v);

  Mat& data() { return a_; }
  const Mat& data() const { return a_; }
  const std::vector<std::array<int, 3>>& triple_list() const { return jkl_; }

  /// r_i = sum_jkl T_ijkl x_j y_k z_l
  Vec contract3(const Vec& x, const Vec& y, const Vec& z) const;
  /// J_ip = sum_kl T_ipkl x_k y_l
  Mat contract2(const Vec& x, const Vec& y) const;

  void setZero();
  SymTensor4& operator+=(const SymTensor4& o);
  SymTensor4& operator*=(double s);

private:
  int rows_ = 0, dim_ = 0;
  Mat a_; // rows x ntriples
  std::vector<std::array<int, 3>> jkl_;
};

} // namespace nlcb
