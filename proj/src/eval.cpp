#include "mpc/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "mpc/errors.hpp"
#include "mpc/smoothers.hpp"

namespace mpc {

namespace {

// Counts inversions of `values` with an iterative bottom-up merge sort.
// Equal elements are never counted as inverted.
std::int64_t count_inversions(std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<double> buffer(n);
  std::int64_t inversions = 0;
  for (std::size_t width = 1; width < n; width *= 2) {
    for (std::size_t lo = 0; lo + width < n; lo += 2 * width) {
      const std::size_t mid = lo + width;
      const std::size_t hi = std::min(lo + 2 * width, n);
      std::size_t left = lo;
      std::size_t right = mid;
      std::size_t out = lo;
      while (left < mid && right < hi) {
        if (values[right] < values[left]) {
          inversions += static_cast<std::int64_t>(mid - left);
          buffer[out++] = values[right++];
        } else {
          buffer[out++] = values[left++];
        }
      }
      std::copy(values.begin() + left, values.begin() + mid, buffer.begin() + out);
      out += mid - left;
      std::copy(values.begin() + right, values.begin() + hi, buffer.begin() + out);
      std::copy(buffer.begin() + lo, buffer.begin() + hi, values.begin() + lo);
    }
  }
  return inversions;
}

// Sum of t*(t-1)/2 over runs of equal keys in a sorted range.
template <typename Iter, typename Equal>
std::int64_t tied_pairs(Iter first, Iter last, Equal equal) {
  std::int64_t total = 0;
  while (first != last) {
    Iter run = first;
    while (run != last && equal(*first, *run)) ++run;
    const std::int64_t t = run - first;
    total += t * (t - 1) / 2;
    first = run;
  }
  return total;
}

}  // namespace

ReconstructionError reconstruction_error(const MetricSpec& metric,
                                         const PointCloud& cloud,
                                         const CurveModel& curve,
                                         Eigen::Ref<const Eigen::VectorXd> lambdas) {
  const Eigen::Index n = cloud.n();
  if (lambdas.size() != n)
    throw DimensionMismatch("reconstruction_error: lambdas size " +
                            std::to_string(lambdas.size()) + " does not match n = " +
                            std::to_string(n));
  if (curve.p() != cloud.p())
    throw DimensionMismatch("reconstruction_error: curve dimension " +
                            std::to_string(curve.p()) + " does not match p = " +
                            std::to_string(cloud.p()));
  double sum_sq = 0.0;
  double sum_metric = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd reconstructed = curve.at(lambdas[i]);
    const Eigen::VectorXd point = cloud.data.row(i).transpose();
    sum_sq += (point - reconstructed).squaredNorm();
    sum_metric += evaluate_metric(metric, point, reconstructed);
  }
  return {std::sqrt(sum_sq / static_cast<double>(n)),
          sum_metric / static_cast<double>(n)};
}

double kendall_tau(Eigen::Ref<const Eigen::VectorXd> a,
                   Eigen::Ref<const Eigen::VectorXd> b) {
  const Eigen::Index n = a.size();
  if (b.size() != n)
    throw DimensionMismatch("kendall_tau: vectors have sizes " +
                            std::to_string(n) + " and " + std::to_string(b.size()));
  if (n < 2)
    throw InsufficientData("kendall_tau: need at least 2 observations, got " +
                           std::to_string(n));

  std::vector<std::pair<double, double>> pairs(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) pairs[static_cast<std::size_t>(i)] = {a[i], b[i]};
  std::sort(pairs.begin(), pairs.end());

  const std::int64_t ties_a = tied_pairs(
      pairs.begin(), pairs.end(),
      [](const auto& x, const auto& y) { return x.first == y.first; });
  const std::int64_t ties_both = tied_pairs(
      pairs.begin(), pairs.end(),
      [](const auto& x, const auto& y) { return x == y; });

  std::vector<double> bs(pairs.size());
  std::transform(pairs.begin(), pairs.end(), bs.begin(),
                 [](const auto& pr) { return pr.second; });
  const std::int64_t exchanges = count_inversions(bs);
  const std::int64_t ties_b =
      tied_pairs(bs.begin(), bs.end(), [](double x, double y) { return x == y; });

  const std::int64_t n0 = static_cast<std::int64_t>(n) * (n - 1) / 2;
  const std::int64_t net = n0 - ties_a - ties_b + ties_both - 2 * exchanges;
  const std::int64_t denom_a = n0 - ties_a;
  const std::int64_t denom_b = n0 - ties_b;
  if (denom_a == 0 || denom_b == 0) return 0.0;
  // single sqrt of the product so the tie-free case lands exactly on +/-1
  return static_cast<double>(net) /
         std::sqrt(static_cast<double>(denom_a) * static_cast<double>(denom_b));
}

double polyline_length(const Curve& curve) {
  const Eigen::Index m = curve.points.rows();
  if (m < 2)
    throw InsufficientData("polyline_length: need at least 2 samples, got " +
                           std::to_string(m));
  double total = 0.0;
  for (Eigen::Index k = 0; k + 1 < m; ++k)
    total += (curve.points.row(k + 1) - curve.points.row(k)).norm();
  return total;
}

EvalReport evaluate_fit(const MpcConfig& config, const PointCloud& cloud,
                        const MpcFit& fit, const Curve& sampled) {
  EvalReport report;
  // reconstruction is measured against the prediction curve, the same curve
  // predict_curve samples; the estimation curve is an optimizer internal
  const CurveModel delivered =
      fit_curve(config.prediction_smoother, fit.lambdas, cloud);
  const ReconstructionError err =
      reconstruction_error(config.metric, cloud, delivered, fit.lambdas);
  report.rmse = err.rmse;
  report.mean_metric_distance = err.mean_metric_distance;
  if (cloud.ground_truth_t.has_value())
    report.kendall_tau_abs = std::abs(kendall_tau(fit.lambdas, *cloud.ground_truth_t));
  report.curve_length = polyline_length(sampled);
  if (!fit.objective_trace.empty()) {
    report.objective_first = fit.objective_trace.front();
    report.objective_last = fit.objective_trace.back();
  }
  return report;
}

}  // namespace mpc
