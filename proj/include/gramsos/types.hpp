#pragma once

#include <Eigen/Dense>

namespace gramsos {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Copies the lower triangle onto the upper one in place.
inline void symmetrize_from_lower(Matrix& w) {
  for (Eigen::Index j = 0; j < w.cols(); ++j)
    for (Eigen::Index i = j + 1; i < w.rows(); ++i) w(j, i) = w(i, j);
}

}  // namespace gramsos
