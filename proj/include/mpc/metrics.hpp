// Point-to-point distances used by the curve objective.
#pragma once

#include <Eigen/Core>

namespace mpc {

enum class MetricKind { Lp, Mahalanobis, Chebyshev, Canberra, Hellinger };

class MetricSpec {
 public:
  static MetricSpec lp(double order);  // order >= 1
  static MetricSpec l1() { return lp(1.0); }
  static MetricSpec l2() { return lp(2.0); }
  static MetricSpec chebyshev();
  static MetricSpec canberra();
  static MetricSpec hellinger();
  // Precision (inverse covariance) matrix, validated SPD via Cholesky.
  static MetricSpec mahalanobis(const Eigen::MatrixXd& precision);
  // Convenience path from a covariance; refuses condition numbers > 1e12.
  static MetricSpec mahalanobis_from_covariance(const Eigen::MatrixXd& covariance);

  MetricKind kind() const { return kind_; }
  double lp_order() const { return order_; }
  const Eigen::MatrixXd& precision() const { return precision_; }

 private:
  MetricSpec(MetricKind kind, double order, Eigen::MatrixXd precision)
      : kind_(kind), order_(order), precision_(std::move(precision)) {}
  MetricKind kind_;
  double order_ = 2.0;
  Eigen::MatrixXd precision_;
};

// d(x, y) for the given spec. Nonnegative, symmetric, d(x,x) = 0.
double evaluate_metric(const MetricSpec& spec, Eigen::Ref<const Eigen::VectorXd> x,
                       Eigen::Ref<const Eigen::VectorXd> y);

}  // namespace mpc
