#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace mementum {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

using MatrixXd = Matrix<double>;
using VectorXd = Vector<double>;
using RowVectorXd = RowVector<double>;

/// Per-day sequence of n x n matrices (one Pi_t, U_t, ... per day).
template <typename Scalar>
using MatrixSequence = std::vector<Matrix<Scalar>>;

}  // namespace mementum
