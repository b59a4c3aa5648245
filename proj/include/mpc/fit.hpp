// The core fitter: alternating curve refits and grid coordinate descent on
// the projection indices.
#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <vector>

#include "mpc/dispersion.hpp"
#include "mpc/metrics.hpp"
#include "mpc/point_cloud.hpp"
#include "mpc/smoothers.hpp"

namespace mpc {

enum class InitKind { FirstPrincipalComponent, Coordinate, Random };

struct InitSpec {
  InitKind kind = InitKind::FirstPrincipalComponent;
  int coordinate = 0;  // used by Coordinate

  static InitSpec first_pc() { return {InitKind::FirstPrincipalComponent, 0}; }
  static InitSpec coordinate_axis(int j) { return {InitKind::Coordinate, j}; }
  static InitSpec random() { return {InitKind::Random, 0}; }
};

struct MpcConfig {
  MetricSpec metric = MetricSpec::l2();
  DispersionSpec dispersion;
  double rho = 0.01;
  SmootherSpec estimation_smoother = SmootherSpec::spline(1.0);
  SmootherSpec prediction_smoother = SmootherSpec::lowess(0.4);
  InitSpec init;
  int grid_size = 256;
  int max_iterations = 50;
  double rel_tolerance = 1e-6;
  std::uint64_t seed = 0;
};

struct MpcFit {
  Eigen::VectorXd lambdas;            // length n, min 0, max 1
  CurveModel estimation_curve;        // refit on the final lambdas
  std::vector<double> objective_trace;
  bool converged = false;
  int iterations_used = 0;
};

// A sampled curve: points.row(k) is the prediction at lambdas[k].
struct Curve {
  Eigen::VectorXd lambdas;  // strictly increasing
  Eigen::MatrixXd points;   // m x p
};

// Initial projection indices. FirstPrincipalComponent projects onto the
// leading singular direction of the centered data; Coordinate copies a data
// column; Random draws i.i.d. uniforms from the seed. The first two are
// affinely rescaled to [0, 1].
Eigen::VectorXd initialize_lambda(const PointCloud& cloud, const InitSpec& init,
                                  std::uint64_t seed);

// Mean metric distance to the curve plus rho times the dispersion penalty.
double objective(const MpcConfig& config, const PointCloud& cloud, const CurveModel& curve,
                 Eigen::Ref<const Eigen::VectorXd> lambdas);

// Best grid candidate for one point's projection index, holding the others
// fixed. Ties between grid values go to the smallest.
double project_point(const MpcConfig& config, const CurveModel& curve,
                     Eigen::Ref<const Eigen::VectorXd> y,
                     Eigen::Ref<const Eigen::VectorXd> grid,
                     Eigen::Ref<const Eigen::VectorXd> lambdas, Eigen::Index index);

MpcFit fit(const MpcConfig& config, const PointCloud& cloud);

// Fits the prediction smoother on the final indices and samples it at m
// equispaced lambdas in [0, 1].
Curve predict_curve(const MpcConfig& config, const PointCloud& cloud, const MpcFit& result,
                    int m);

}  // namespace mpc
