#include <doctest.h>

#include "helpers.hpp"
#include "nlcb/tensor.hpp"

using namespace nlcb;

TEST_CASE("pair and triple index enumeration") {
  const int dim = 5;
  SymTensor3 t3(2, dim);
  const auto& pairs = t3.pair_list();
  CHECK(static_cast<int>(pairs.size()) == dim * (dim + 1) / 2);
  for (int p = 0; p < t3.pairs(); ++p) {
    const auto [j, k] = pairs[p];
    CHECK(j <= k);
    CHECK(SymTensor3::pair_index(j, k, dim) == p);
    CHECK(SymTensor3::pair_index(k, j, dim) == p); // order must not matter
  }

  SymTensor4 t4(2, dim);
  const auto& triples = t4.triple_list();
  CHECK(static_cast<int>(triples.size()) == dim * (dim + 1) * (dim + 2) / 6);
  for (int q = 0; q < t4.triples(); ++q) {
    const auto [j, k, l] = triples[q];
    CHECK(j <= k);
    CHECK(k <= l);
    CHECK(SymTensor4::triple_index(j, k, l, dim) == q);
    CHECK(SymTensor4::triple_index(l, j, k, dim) == q);
    CHECK(SymTensor4::triple_index(k, l, j, dim) == q);
  }
}

TEST_CASE("entry access is symmetric in the trailing indices") {
  SymTensor3 t3(3, 4);
  t3.add(1, 3, 2, 5.0);
  CHECK(t3(1, 2, 3) == 5.0);
  CHECK(t3(1, 3, 2) == 5.0);
  CHECK(t3(0, 2, 3) == 0.0);

  SymTensor4 t4(3, 4);
  t4.add(2, 3, 1, 2, -7.0);
  CHECK(t4(2, 1, 2, 3) == -7.0);
  CHECK(t4(2, 3, 2, 1) == -7.0);
  CHECK(t4(2, 2, 1, 3) == -7.0);
}

namespace {

SymTensor3 random_t3(int rows, int dim, unsigned seed) {
  SymTensor3 t(rows, dim);
  t.data() = Eigen::Map<Mat>(fix::test_vector(rows * t.pairs(), seed).data(), rows, t.pairs());
  return t;
}

SymTensor4 random_t4(int rows, int dim, unsigned seed) {
  SymTensor4 t(rows, dim);
  t.data() = Eigen::Map<Mat>(fix::test_vector(rows * t.triples(), seed).data(), rows, t.triples());
  return t;
}

} // namespace

TEST_CASE("contractions match brute-force loops over the full tensor") {
  const int rows = 4, dim = 5;
  const SymTensor3 t3 = random_t3(rows, dim, 1);
  const SymTensor4 t4 = random_t4(rows, dim, 2);
  const Vec x = fix::test_vector(dim, 3), y = fix::test_vector(dim, 4),
            z = fix::test_vector(dim, 5);

  Vec r3 = Vec::Zero(rows), r4 = Vec::Zero(rows);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < dim; ++j)
      for (int k = 0; k < dim; ++k) {
        r3[i] += t3(i, j, k) * x[j] * y[k];
        for (int l = 0; l < dim; ++l) r4[i] += t4(i, j, k, l) * x[j] * y[k] * z[l];
      }
  CHECK((t3.contract2(x, y) - r3).norm() <= 1e-13 * r3.norm());
  CHECK((t4.contract3(x, y, z) - r4).norm() <= 1e-13 * r4.norm());

  Mat j3 = Mat::Zero(rows, dim), j4 = Mat::Zero(rows, dim);
  for (int i = 0; i < rows; ++i)
    for (int p = 0; p < dim; ++p)
      for (int k = 0; k < dim; ++k) {
        j3(i, p) += t3(i, p, k) * x[k];
        for (int l = 0; l < dim; ++l) j4(i, p) += t4(i, p, k, l) * x[k] * y[l];
      }
  CHECK((t3.contract1(x) - j3).norm() <= 1e-13 * j3.norm());
  CHECK((t4.contract2(x, y) - j4).norm() <= 1e-13 * j4.norm());
}

TEST_CASE("contract1 is the jacobian of contract2") {
  const int rows = 3, dim = 4;
  const SymTensor3 t3 = random_t3(rows, dim, 7);
  const Vec x = fix::test_vector(dim, 8);
  const double h = 1e-6;

  // d/dx [T:(x,x)] = 2 T.contract1(x) by trailing symmetry
  const Mat J = 2.0 * t3.contract1(x);
  for (int p = 0; p < dim; ++p) {
    Vec xp = x, xm = x;
    xp[p] += h;
    xm[p] -= h;
    const Vec fd = (t3.contract2(xp, xp) - t3.contract2(xm, xm)) / (2.0 * h);
    CHECK((J.col(p) - fd).norm() <= 1e-8 * (fd.norm() + 1.0));
  }
}

TEST_CASE("accumulation and scaling") {
  SymTensor3 a = random_t3(3, 3, 11), b = random_t3(3, 3, 12);
  const Vec x = fix::test_vector(3, 13);
  const Vec sum = a.contract2(x, x) + b.contract2(x, x);
  a += b;
  CHECK((a.contract2(x, x) - sum).norm() <= 1e-13 * sum.norm());
  a *= 0.5;
  CHECK((a.contract2(x, x) - 0.5 * sum).norm() <= 1e-13 * sum.norm());

  SymTensor3 empty;
  CHECK(empty.empty());
  SymTensor3 sized(2, 2);
  CHECK(!sized.empty());
  sized.add(0, 0, 1, 3.0);
  sized.setZero();
  CHECK(sized(0, 0, 1) == 0.0);
}
