#pragma once

#include <optional>

#include <Eigen/Dense>

#include "mpc/fit.hpp"
#include "mpc/metrics.hpp"
#include "mpc/point_cloud.hpp"
#include "mpc/smoothers.hpp"

namespace mpc {

// Diagnostics attached to a finished fit. kendall_tau_abs is only present
// when the evaluated cloud carries a ground-truth parameter column.
struct EvalReport {
  double rmse = 0.0;
  double mean_metric_distance = 0.0;
  std::optional<double> kendall_tau_abs;
  double curve_length = 0.0;
  double objective_first = 0.0;
  double objective_last = 0.0;
};

struct ReconstructionError {
  double rmse = 0.0;
  double mean_metric_distance = 0.0;
};

// rmse is the root mean squared Euclidean residual between each point and its
// curve value; mean_metric_distance averages the configured metric instead.
ReconstructionError reconstruction_error(const MetricSpec& metric,
                                         const PointCloud& cloud,
                                         const CurveModel& curve,
                                         Eigen::Ref<const Eigen::VectorXd> lambdas);

// Kendall's tau-b: pairs tied in either vector are dropped from the
// concordant/discordant counts and the denominator is adjusted accordingly.
// Returns 0 when either vector is entirely tied.
double kendall_tau(Eigen::Ref<const Eigen::VectorXd> a,
                   Eigen::Ref<const Eigen::VectorXd> b);

// Sum of Euclidean segment lengths of the sampled curve.
double polyline_length(const Curve& curve);

// Assembles the report for a fit: reconstruction against the prediction
// curve at the final lambdas, ordering recovery against ground truth when
// available, and the length of the sampled output curve.
EvalReport evaluate_fit(const MpcConfig& config, const PointCloud& cloud,
                        const MpcFit& fit, const Curve& sampled);

}  // namespace mpc
