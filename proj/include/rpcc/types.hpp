#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>

namespace rpcc {

/// Dense row-major storage: row i is point / edge / centroid i.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

using Seed = std::uint64_t;

}  // namespace rpcc
