#pragma once

#include <Eigen/Dense>

namespace stq {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

} // namespace stq
