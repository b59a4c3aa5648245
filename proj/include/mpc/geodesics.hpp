#pragma once

#include <functional>

#include <Eigen/Dense>

namespace mpc {

enum class FieldKind { EuclideanIdentity, ConstantSPD, Conformal, Custom };

// A Riemannian metric field: a symmetric positive definite matrix M(x) at
// every point of R^d. Built-in kinds carry analytic derivatives; custom
// evaluators are differentiated numerically.
class MetricField {
 public:
  using Evaluator = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

  static MetricField euclidean(int dimension);
  static MetricField constant(Eigen::MatrixXd matrix);
  // exp(2 * rate * x1) times the identity
  static MetricField conformal(int dimension, double rate);
  static MetricField custom(int dimension, Evaluator evaluator);

  int dimension() const { return dimension_; }
  FieldKind kind() const { return kind_; }
  double rate() const { return rate_; }

  // Evaluates M(x), checking symmetry, finiteness and positive definiteness.
  Eigen::MatrixXd at(const Eigen::VectorXd& x) const;

 private:
  MetricField(FieldKind kind, int dimension) : kind_(kind), dimension_(dimension) {}

  FieldKind kind_;
  int dimension_;
  double rate_ = 0.0;
  Eigen::MatrixXd matrix_;
  Evaluator evaluator_;
};

// States of one integrated geodesic: row k of positions/velocities holds
// gamma(times[k]) and gamma'(times[k]).
struct GeodesicPath {
  Eigen::VectorXd times;
  Eigen::MatrixXd positions;
  Eigen::MatrixXd velocities;
};

// Acceleration solving M(x) gamma'' = -1/2 (d vec M / dx)^T (v kron v).
// Built-in field kinds use closed-form derivatives; anything else differences
// the metric centrally with step 1e-5 * (1 + max|x|).
Eigen::VectorXd geodesic_rhs(const MetricField& field, const Eigen::VectorXd& x,
                             const Eigen::VectorXd& v);

// Classical fourth-order Runge-Kutta over t in [0, 1] with uniform steps.
GeodesicPath integrate_geodesic(const MetricField& field, const Eigen::VectorXd& x0,
                                const Eigen::VectorXd& v0, int steps);

// Damped Newton shooting: finds v0 so the integrated endpoint hits y within
// 1e-8, starting from v0 = y - x.
GeodesicPath shoot_geodesic(const MetricField& field, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& y, int steps, int max_newton);

// Trapezoidal quadrature of sqrt(v^T M(x) v) over the recorded states.
double metric_length(const MetricField& field, const GeodesicPath& path);

}  // namespace mpc
