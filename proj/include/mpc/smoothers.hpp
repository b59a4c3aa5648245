// Univariate scatterplot smoothers and the per-coordinate curve model.
#pragma once

#include <Eigen/Core>
#include <optional>
#include <variant>
#include <vector>

#include "mpc/point_cloud.hpp"

namespace mpc {

enum class SmootherKind { SmoothingSpline, Lowess, KernelRidge, NadarayaWatson };

struct SmootherSpec {
  SmootherKind kind = SmootherKind::SmoothingSpline;
  double penalty = 1.0;                // spline curvature weight, >= 0
  double bandwidth = 0.3;              // lowess and nadaraya-watson, > 0
  int iterations = 0;                  // lowess robustifying passes, >= 0
  double alpha = 1e-3;                 // kernel ridge regularizer, >= 0
  std::optional<double> lengthscale;   // kernel ridge; empty selects the median heuristic

  static SmootherSpec spline(double penalty);
  static SmootherSpec lowess(double bandwidth, int iterations = 0);
  static SmootherSpec kernel_ridge(double alpha,
                                   std::optional<double> lengthscale = std::nullopt);
  static SmootherSpec nadaraya_watson(double bandwidth);
};

namespace detail {

struct SplineState {
  std::vector<double> knots;        // clamped cubic knot vector
  Eigen::VectorXd coeffs;
};
struct LowessState {
  std::vector<double> xs, ys;
  std::vector<double> robustness;   // bisquare weights after robustifying passes
  int window = 4;                   // nearest-neighbor count per local fit
};
struct KernelRidgeState {
  std::vector<double> xs;
  Eigen::VectorXd dual;
  double lengthscale = 1.0;
};
struct NadarayaState {
  std::vector<double> xs, ys;
  double bandwidth = 1.0;
};
using SmootherState = std::variant<SplineState, LowessState, KernelRidgeState, NadarayaState>;

}  // namespace detail

// A fitted univariate smoother. Immutable; predict is defined on all of R,
// with linear extrapolation from the nearest boundary outside the training
// input range.
class SmootherModel {
 public:
  double predict(double x) const;
  const SmootherSpec& spec() const { return spec_; }
  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }

 private:
  SmootherModel(SmootherSpec spec, detail::SmootherState state);
  double interior(double x) const;

  friend SmootherModel fit_smoother(const SmootherSpec&, Eigen::Ref<const Eigen::VectorXd>,
                                    Eigen::Ref<const Eigen::VectorXd>);

  SmootherSpec spec_;
  detail::SmootherState state_;
  double x_min_ = 0.0, x_max_ = 1.0;
  double lo_value_ = 0.0, lo_slope_ = 0.0;  // extrapolation anchors
  double hi_value_ = 0.0, hi_slope_ = 0.0;
};

// Fits one smoother on (xs, ys). Requires n >= 4 and at least two distinct xs.
// Tied xs are deterministically spread apart before spline/lowess fitting.
SmootherModel fit_smoother(const SmootherSpec& spec, Eigen::Ref<const Eigen::VectorXd> xs,
                           Eigen::Ref<const Eigen::VectorXd> ys);

// p univariate smoothers sharing one lambda vector; evaluating all of them at
// a lambda yields the curve point in R^p.
class CurveModel {
 public:
  Eigen::Index p() const { return static_cast<Eigen::Index>(coords_.size()); }
  const SmootherModel& coordinate(Eigen::Index j) const {
    return coords_[static_cast<std::size_t>(j)];
  }
  Eigen::VectorXd at(double lambda) const;
  // Curve points for a batch of lambdas, one column per lambda (p x m).
  Eigen::MatrixXd sample(Eigen::Ref<const Eigen::VectorXd> lambdas) const;

 private:
  explicit CurveModel(std::vector<SmootherModel> coords) : coords_(std::move(coords)) {}
  friend CurveModel fit_curve(const SmootherSpec&, Eigen::Ref<const Eigen::VectorXd>,
                              const PointCloud&);
  std::vector<SmootherModel> coords_;
};

CurveModel fit_curve(const SmootherSpec& spec, Eigen::Ref<const Eigen::VectorXd> lambdas,
                     const PointCloud& cloud);

}  // namespace mpc
