#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace nlcb {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

/// Execution mode for element-loop kernels. Serial is the reference path;
/// Parallel uses OpenMP with the globally configured thread count.
enum class Exec { Serial, Parallel };

void set_parallel_threads(int n);
int parallel_threads();

} // namespace nlcb
