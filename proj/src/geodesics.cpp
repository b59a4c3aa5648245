#include "mpc/geodesics.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "mpc/errors.hpp"

namespace mpc {

namespace {

void require_dimension(const MetricField& field, const Eigen::VectorXd& x,
                       const char* what) {
  if (x.size() != field.dimension())
    throw DimensionMismatch(std::string(what) + " has dimension " +
                            std::to_string(x.size()) + ", field expects " +
                            std::to_string(field.dimension()));
}

// Shared validated factorization of M(x).
Eigen::LLT<Eigen::MatrixXd> factor_metric(const Eigen::MatrixXd& m) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success)
    throw SingularMetric("metric matrix is not positive definite");
  return llt;
}

}  // namespace

MetricField MetricField::euclidean(int dimension) {
  if (dimension < 1) throw InvalidSpec("field dimension must be >= 1");
  return MetricField(FieldKind::EuclideanIdentity, dimension);
}

MetricField MetricField::constant(Eigen::MatrixXd matrix) {
  if (matrix.rows() < 1 || matrix.rows() != matrix.cols())
    throw InvalidSpec("constant metric must be a square matrix");
  MetricField field(FieldKind::ConstantSPD, static_cast<int>(matrix.rows()));
  field.matrix_ = std::move(matrix);
  field.at(Eigen::VectorXd::Zero(field.dimension_));  // reject bad matrices early
  return field;
}

MetricField MetricField::conformal(int dimension, double rate) {
  if (dimension < 1) throw InvalidSpec("field dimension must be >= 1");
  if (!std::isfinite(rate)) throw InvalidSpec("conformal rate must be finite");
  MetricField field(FieldKind::Conformal, dimension);
  field.rate_ = rate;
  return field;
}

MetricField MetricField::custom(int dimension, Evaluator evaluator) {
  if (dimension < 1) throw InvalidSpec("field dimension must be >= 1");
  if (!evaluator) throw InvalidSpec("custom field needs an evaluator");
  MetricField field(FieldKind::Custom, dimension);
  field.evaluator_ = std::move(evaluator);
  return field;
}

Eigen::MatrixXd MetricField::at(const Eigen::VectorXd& x) const {
  require_dimension(*this, x, "point");
  Eigen::MatrixXd m;
  switch (kind_) {
    case FieldKind::EuclideanIdentity:
      return Eigen::MatrixXd::Identity(dimension_, dimension_);
    case FieldKind::ConstantSPD:
      m = matrix_;
      break;
    case FieldKind::Conformal: {
      const double scale = std::exp(2.0 * rate_ * x[0]);
      if (!std::isfinite(scale))
        throw NonFinite("conformal factor overflows at x1 = " + std::to_string(x[0]));
      if (scale <= 0.0)
        throw SingularMetric("conformal factor underflows at x1 = " +
                             std::to_string(x[0]));
      return scale * Eigen::MatrixXd::Identity(dimension_, dimension_);
    }
    case FieldKind::Custom:
      m = evaluator_(x);
      break;
  }
  if (m.rows() != dimension_ || m.cols() != dimension_)
    throw DimensionMismatch("metric evaluator returned a " + std::to_string(m.rows()) +
                            "x" + std::to_string(m.cols()) + " matrix for dimension " +
                            std::to_string(dimension_));
  if (!m.allFinite()) throw NonFinite("metric matrix has non-finite entries");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw SingularMetric("metric matrix is not symmetric");
  factor_metric(m);
  return m;
}

Eigen::VectorXd geodesic_rhs(const MetricField& field, const Eigen::VectorXd& x,
                             const Eigen::VectorXd& v) {
  require_dimension(field, x, "point");
  require_dimension(field, v, "velocity");
  const int d = field.dimension();

  switch (field.kind()) {
    case FieldKind::EuclideanIdentity:
    case FieldKind::ConstantSPD:
      return Eigen::VectorXd::Zero(d);
    case FieldKind::Conformal: {
      // the conformal factor cancels: gamma'' = -rate * |v|^2 * e1
      field.at(x);
      Eigen::VectorXd accel = Eigen::VectorXd::Zero(d);
      accel[0] = -field.rate() * v.squaredNorm();
      return accel;
    }
    case FieldKind::Custom:
      break;
  }

  const Eigen::MatrixXd m = field.at(x);
  const double h = 1e-5 * (1.0 + x.cwiseAbs().maxCoeff());
  Eigen::VectorXd b(d);
  Eigen::VectorXd probe = x;
  for (int k = 0; k < d; ++k) {
    probe[k] = x[k] + h;
    const Eigen::MatrixXd forward = field.at(probe);
    probe[k] = x[k] - h;
    const Eigen::MatrixXd backward = field.at(probe);
    probe[k] = x[k];
    const Eigen::MatrixXd slope = (forward - backward) / (2.0 * h);
    b[k] = -0.5 * v.dot(slope * v);
  }
  const Eigen::VectorXd accel = factor_metric(m).solve(b);
  if (!accel.allFinite()) throw NonFinite("geodesic acceleration is not finite");
  return accel;
}

GeodesicPath integrate_geodesic(const MetricField& field, const Eigen::VectorXd& x0,
                                const Eigen::VectorXd& v0, int steps) {
  if (steps < 8) throw InvalidSpec("integration needs at least 8 steps, got " +
                                   std::to_string(steps));
  require_dimension(field, x0, "start point");
  require_dimension(field, v0, "start velocity");
  const int d = field.dimension();
  const double h = 1.0 / steps;

  GeodesicPath path;
  path.times.resize(steps + 1);
  path.positions.resize(steps + 1, d);
  path.velocities.resize(steps + 1, d);

  Eigen::VectorXd x = x0;
  Eigen::VectorXd v = v0;
  path.times[0] = 0.0;
  path.positions.row(0) = x.transpose();
  path.velocities.row(0) = v.transpose();

  for (int step = 0; step < steps; ++step) {
    const double t = static_cast<double>(step) * h;
    try {
      const Eigen::VectorXd a1 = geodesic_rhs(field, x, v);
      const Eigen::VectorXd a2 = geodesic_rhs(field, x + 0.5 * h * v,
                                              v + 0.5 * h * a1);
      const Eigen::VectorXd a3 =
          geodesic_rhs(field, x + 0.5 * h * v + 0.25 * h * h * a1, v + 0.5 * h * a2);
      const Eigen::VectorXd a4 =
          geodesic_rhs(field, x + h * v + 0.5 * h * h * a2, v + h * a3);
      x += h * v + h * h / 6.0 * (a1 + a2 + a3);
      v += h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
    } catch (const SingularMetric& e) {
      throw SingularMetric(std::string(e.what()) + " (integrating near t = " +
                           std::to_string(t) + ")");
    } catch (const NonFinite& e) {
      throw NonFinite(std::string(e.what()) + " (integrating near t = " +
                      std::to_string(t) + ")");
    }
    path.times[step + 1] = static_cast<double>(step + 1) * h;
    path.positions.row(step + 1) = x.transpose();
    path.velocities.row(step + 1) = v.transpose();
  }
  return path;
}

GeodesicPath shoot_geodesic(const MetricField& field, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& y, int steps, int max_newton) {
  require_dimension(field, x, "start point");
  require_dimension(field, y, "end point");
  if (max_newton < 1) throw InvalidSpec("shooting needs max_newton >= 1");
  const int d = field.dimension();

  Eigen::VectorXd v0 = y - x;
  GeodesicPath path = integrate_geodesic(field, x, v0, steps);
  Eigen::VectorXd residual = path.positions.row(steps).transpose() - y;

  for (int iter = 0; iter < max_newton; ++iter) {
    if (residual.norm() < 1e-8) return path;

    const double delta = 1e-6 * (1.0 + v0.cwiseAbs().maxCoeff());
    Eigen::MatrixXd jacobian(d, d);
    for (int j = 0; j < d; ++j) {
      Eigen::VectorXd bumped = v0;
      bumped[j] += delta;
      const GeodesicPath plus = integrate_geodesic(field, x, bumped, steps);
      bumped[j] = v0[j] - delta;
      const GeodesicPath minus = integrate_geodesic(field, x, bumped, steps);
      jacobian.col(j) =
          (plus.positions.row(steps) - minus.positions.row(steps)).transpose() /
          (2.0 * delta);
    }

    const Eigen::VectorXd direction = jacobian.fullPivLu().solve(-residual);
    if (!direction.allFinite())
      throw NoConvergence("shooting update is not finite; the endpoint map is singular");

    bool improved = false;
    double damping = 1.0;
    for (int halving = 0; halving < 30; ++halving) {
      const Eigen::VectorXd trial_v0 = v0 + damping * direction;
      // a trial that leaves the field's valid region counts as a failed step
      try {
        GeodesicPath trial = integrate_geodesic(field, x, trial_v0, steps);
        const Eigen::VectorXd trial_residual =
            trial.positions.row(steps).transpose() - y;
        if (trial_residual.norm() < residual.norm()) {
          v0 = trial_v0;
          path = std::move(trial);
          residual = trial_residual;
          improved = true;
          break;
        }
      } catch (const SingularMetric&) {
      } catch (const NonFinite&) {
      }
      damping *= 0.5;
    }
    if (!improved)
      throw NoConvergence("shooting stalled with endpoint residual " +
                          std::to_string(residual.norm()));
  }
  if (residual.norm() < 1e-8) return path;
  throw NoConvergence("no shooting solution after " + std::to_string(max_newton) +
                      " iterations; endpoint residual " + std::to_string(residual.norm()));
}

double metric_length(const MetricField& field, const GeodesicPath& path) {
  const Eigen::Index m = path.times.size();
  if (m < 1) throw InsufficientData("metric length needs a nonempty path");
  if (path.positions.rows() != m || path.velocities.rows() != m)
    throw DimensionMismatch("path state counts disagree with its time grid");

  auto speed = [&](Eigen::Index k) {
    const Eigen::VectorXd xk = path.positions.row(k).transpose();
    const Eigen::VectorXd vk = path.velocities.row(k).transpose();
    const double q = vk.dot(field.at(xk) * vk);
    return std::sqrt(std::max(0.0, q));
  };

  double total = 0.0;
  double prev = speed(0);
  for (Eigen::Index k = 1; k < m; ++k) {
    const double next = speed(k);
    total += 0.5 * (path.times[k] - path.times[k - 1]) * (prev + next);
    prev = next;
  }
  return total;
}

}  // namespace mpc
