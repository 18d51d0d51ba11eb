#pragma once

#include <Eigen/Dense>

namespace mcss {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

}  // namespace mcss
