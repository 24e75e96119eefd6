#include "nlcb/tensor.hpp"

#include <algorithm>
#include <stdexcept>

namespace nlcb {

namespace {
void sort2(int& j, int& k) {
  if (j > k) std::swap(j, k);
}
void sort3(int& j, int& k, int& l) {
  sort2(j, k);
  sort2(k, l);
  sort2(j, k);
}
} // namespace

SymTensor3::SymTensor3(int rows, int dim) : rows_(rows), dim_(dim) {
  if (rows < 0 || dim < 0) throw std::invalid_argument("SymTensor3: negative dims");
  jk_.reserve(dim * (dim + 1) / 2);
  for (int j = 0; j < dim; ++j)
    for (int k = j; k < dim; ++k) jk_.push_back({j, k});
  a_ = Mat::Zero(rows, static_cast<int>(jk_.size()));
}

int SymTensor3::pair_index(int j, int k, int dim) {
  sort2(j, k);
  return j * (2 * dim - j - 1) / 2 + k;
}

double SymTensor3::operator()(int i, int j, int k) const {
  return a_(i, pair_index(j, k, dim_));
}

void SymTensor3::add(int i, int j, int k, double v) {
  a_(i, pair_index(j, k, dim_)) += v;
}

Vec SymTensor3::contract2(const Vec& x, const Vec& y) const {
  Vec r = Vec::Zero(rows_);
  for (int p = 0; p < pairs(); ++p) {
    const auto [j, k] = jk_[p];
    const double s = (j == k) ? x[j] * y[j] : x[j] * y[k] + x[k] * y[j];
    if (s != 0.0) r.noalias() += a_.col(p) * s;
  }
  return r;
}

Mat SymTensor3::contract1(const Vec& x) const {
  Mat J = Mat::Zero(rows_, dim_);
  for (int p = 0; p < pairs(); ++p) {
    const auto [j, k] = jk_[p];
    if (j == k) {
      J.col(j).noalias() += a_.col(p) * x[j];
    } else {
      J.col(j).noalias() += a_.col(p) * x[k];
      J.col(k).noalias() += a_.col(p) * x[j];
    }
  }
  return J;
}

void SymTensor3::setZero() { a_.setZero(); }

SymTensor3& SymTensor3::operator+=(const SymTensor3& o) {
  if (o.rows_ != rows_ || o.dim_ != dim_) throw std::invalid_argument("SymTensor3 += shape mismatch");
  a_ += o.a_;
  return *this;
}

SymTensor3& SymTensor3::operator*=(double s) {
  a_ *= s;
  return *this;
}

SymTensor4::SymTensor4(int rows, int dim) : rows_(rows), dim_(dim) {
  for (int j = 0; j < dim; ++j)
    for (int k = j; k < dim; ++k)
      for (int l = k; l < dim; ++l) jkl_.push_back({j, k, l});
  a_ = Mat::Zero(rows, static_cast<int>(jkl_.size()));
}

int SymTensor4::triple_index(int j, int k, int l, int dim) {
  sort3(j, k, l);
  // triples before leading index j, then pair offset within the (dim - j) tail
  const auto tail = [dim](int a) {
    const int t = dim - a;
    return t * (t + 1) * (t + 2) / 6;
  };
  const int base = tail(0) - tail(j);
  return base + SymTensor3::pair_index(k - j, l - j, dim - j);
}

double SymTensor4::operator()(int i, int j, int k, int l) const {
  return a_(i, triple_index(j, k, l, dim_));
}

void SymTensor4::add(int i, int j, int k, int l, double v) {
  a_(i, triple_index(j, k, l, dim_)) += v;
}

Vec SymTensor4::contract3(const Vec& x, const Vec& y, const Vec& z) const {
  Vec r = Vec::Zero(rows_);
  for (int t = 0; t < triples(); ++t) {
    const auto [j, k, l] = jkl_[t];
    double s;
    if (j == k && k == l) {
      s = x[j] * y[j] * z[j];
    } else if (j == k) { // j = k < l
      s = x[j] * y[j] * z[l] + x[j] * y[l] * z[j] + x[l] * y[j] * z[j];
    } else if (k == l) { // j < k = l
      s = x[j] * y[k] * z[k] + x[k] * y[j] * z[k] + x[k] * y[k] * z[j];
    } else {
      s = x[j] * y[k] * z[l] + x[j] * y[l] * z[k] + x[k] * y[j] * z[l] +
          x[k] * y[l] * z[j] + x[l] * y[j] * z[k] + x[l] * y[k] * z[j];
    }
    if (s != 0.0) r.noalias() += a_.col(t) * s;
  }
  return r;
}

Mat SymTensor4::contract2(const Vec& x, const Vec& y) const {
  Mat J = Mat::Zero(rows_, dim_);
  const auto hit = [&](int p, int q, int r, int t) {
    const double s = x[q] * y[r] + x[r] * y[q];
    J.col(p).noalias() += a_.col(t) * (0.5 * s);
  };
  for (int t = 0; t < triples(); ++t) {
    const auto [j, k, l] = jkl_[t];
    // enumerate distinct permutations (p | q, r); (q,r) order handled by hit()
    if (j == k && k == l) {
      hit(j, j, j, t);
    } else if (j == k) {
      hit(j, j, l, t);
      hit(j, l, j, t);
      hit(l, j, j, t);
    } else if (k == l) {
      hit(j, k, k, t);
      hit(k, j, k, t);
      hit(k, k, j, t);
    } else {
      hit(j, k, l, t);
      hit(j, l, k, t);
      hit(k, j, l, t);
      hit(k, l, j, t);
      hit(l, j, k, t);
      hit(l, k, j, t);
    }
  }
  return J;
}

void SymTensor4::setZero() { a_.setZero(); }

SymTensor4& SymTensor4::operator+=(const SymTensor4& o) {
  if (o.rows_ != rows_ || o.dim_ != dim_) throw std::invalid_argument("SymTensor4 += shape mismatch");
  a_ += o.a_;
  return *this;
}

SymTensor4& SymTensor4::operator*=(double s) {
  a_ *= s;
  return *this;
}

} // namespace nlcb
