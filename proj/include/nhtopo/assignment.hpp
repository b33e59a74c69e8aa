#pragma once

#include <vector>

#include <Eigen/Dense>

namespace nhtopo {

/// Minimum-cost perfect matching on a square cost matrix (Hungarian algorithm).
/// Returns `assign` with row i matched to column assign[i].
std::vector<int> min_cost_assignment(const Eigen::MatrixXd& cost);

}  // namespace nhtopo
