#pragma once

#include <Eigen/Dense>

namespace ecve {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

} // namespace ecve
