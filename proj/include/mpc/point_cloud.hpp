#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

namespace mpc {

// A set of n observations in R^p, one row per point. Generators attach the
// true curve parameter in ground_truth_t; ingested files may carry integer
// labels (e.g. digit classes). All entries are finite by construction.
struct PointCloud {
  Eigen::MatrixXd data;                       // n x p
  std::optional<Eigen::VectorXd> ground_truth_t;  // length n when present
  std::optional<std::vector<int>> labels;         // length n when present

  Eigen::Index n() const { return data.rows(); }
  Eigen::Index p() const { return data.cols(); }
};

}  // namespace mpc
