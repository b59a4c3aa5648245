#include "mpc/metrics.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <sstream>

#include "mpc/errors.hpp"

namespace mpc {

namespace {

void require_symmetric(const Eigen::MatrixXd& m, const char* what) {
  if (m.rows() != m.cols()) throw InvalidSpec(std::string(what) + " matrix must be square");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw InvalidSpec(std::string(what) + " matrix must be symmetric");
}

}  // namespace

MetricSpec MetricSpec::lp(double order) {
  if (!(order >= 1.0))
    throw InvalidSpec("Lp order must be >= 1, got " + std::to_string(order));
  return MetricSpec(MetricKind::Lp, order, Eigen::MatrixXd());
}

MetricSpec MetricSpec::chebyshev() {
  return MetricSpec(MetricKind::Chebyshev, 0.0, Eigen::MatrixXd());
}

MetricSpec MetricSpec::canberra() {
  return MetricSpec(MetricKind::Canberra, 0.0, Eigen::MatrixXd());
}

MetricSpec MetricSpec::hellinger() {
  return MetricSpec(MetricKind::Hellinger, 0.0, Eigen::MatrixXd());
}

MetricSpec MetricSpec::mahalanobis(const Eigen::MatrixXd& precision) {
  require_symmetric(precision, "precision");
  Eigen::LLT<Eigen::MatrixXd> llt(precision);
  if (llt.info() != Eigen::Success)
    throw InvalidSpec("precision matrix is not positive definite");
  return MetricSpec(MetricKind::Mahalanobis, 0.0, precision);
}

MetricSpec MetricSpec::mahalanobis_from_covariance(const Eigen::MatrixXd& covariance) {
  require_symmetric(covariance, "covariance");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(covariance);
  if (es.info() != Eigen::Success)
    throw InvalidSpec("covariance eigendecomposition failed");
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (!(lo > 0.0)) throw InvalidSpec("covariance matrix is not positive definite");
  if (hi / lo > 1e12) {
    std::ostringstream os;
    os << "covariance condition number " << hi / lo << " exceeds 1e12";
    throw InvalidSpec(os.str());
  }
  return mahalanobis(covariance.inverse());
}

double evaluate_metric(const MetricSpec& spec, Eigen::Ref<const Eigen::VectorXd> x,
                       Eigen::Ref<const Eigen::VectorXd> y) {
  const Eigen::Index p = x.size();
  if (p != y.size())
    throw DimensionMismatch("metric arguments differ in length: " +
                            std::to_string(x.size()) + " vs " + std::to_string(y.size()));
  if (p < 1) throw DimensionMismatch("metric arguments must have length >= 1");

  switch (spec.kind()) {
    case MetricKind::Lp: {
      const double q = spec.lp_order();
      // Factor out the max gap so |d|^q never overflows for large q.
      const double m = (x - y).cwiseAbs().maxCoeff();
      if (m == 0.0) return 0.0;
      double sum = 0.0;
      for (Eigen::Index j = 0; j < p; ++j)
        sum += std::pow(std::abs(x[j] - y[j]) / m, q);
      return m * std::pow(sum, 1.0 / q);
    }
    case MetricKind::Chebyshev:
      return (x - y).cwiseAbs().maxCoeff();
    case MetricKind::Canberra: {
      double sum = 0.0;
      for (Eigen::Index j = 0; j < p; ++j) {
        const double num = std::abs(x[j] - y[j]);
        const double den = std::abs(x[j]) + std::abs(y[j]);
        if (den > 0.0) sum += num / den;  // 0/0 terms contribute 0
      }
      return sum;
    }
    case MetricKind::Mahalanobis: {
      if (spec.precision().rows() != p)
        throw DimensionMismatch("precision matrix is " +
                                std::to_string(spec.precision().rows()) +
                                "x" + std::to_string(spec.precision().cols()) +
                                " but vectors have length " + std::to_string(p));
      const Eigen::VectorXd d = x - y;
      return std::sqrt(std::max(0.0, d.dot(spec.precision() * d)));
    }
    case MetricKind::Hellinger: {
      double sum = 0.0;
      for (Eigen::Index j = 0; j < p; ++j) {
        if (x[j] < 0.0 || y[j] < 0.0)
          throw DomainError("Hellinger distance requires nonnegative entries; "
                            "coordinate " + std::to_string(j) + " is negative");
        const double d = std::sqrt(x[j]) - std::sqrt(y[j]);
        sum += d * d;
      }
      return std::sqrt(sum) / std::numbers::sqrt2;
    }
  }
  throw InvalidSpec("unknown metric kind");
}

}  // namespace mpc
