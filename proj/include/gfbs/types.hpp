#pragma once

#include <Eigen/Dense>

namespace gfbs {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

}  // namespace gfbs
