#pragma once

#include <Eigen/Dense>

namespace zeno {

// Scaling-and-squaring with a degree-13 Pade approximant.
Eigen::MatrixXcd expm(const Eigen::MatrixXcd& a);

}  // namespace zeno
