#include "mpc/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mpc/errors.hpp"

namespace mpc {

namespace {

double cv_of(double sum, double sum_sq, std::size_t n) {
  const double mean = sum / static_cast<double>(n);
  if (mean == 0.0) throw ZeroMean("coefficient of variation undefined: mean is zero");
  const double ss = std::max(0.0, sum_sq - static_cast<double>(n) * mean * mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  return sd / std::abs(mean);
}

}  // namespace

double evaluate_dispersion(const DispersionSpec& spec,
                           Eigen::Ref<const Eigen::VectorXd> lambdas) {
  const auto n = static_cast<std::size_t>(lambdas.size());
  if (n < 2) throw InsufficientData("dispersion needs at least 2 values, got " +
                                    std::to_string(n));

  std::vector<double> v(lambdas.data(), lambdas.data() + lambdas.size());
  std::sort(v.begin(), v.end());

  switch (spec.kind) {
    case DispersionKind::L1Gaps: {
      double s = 0.0;
      for (std::size_t i = 0; i + 1 < n; ++i) s += std::abs(v[i + 1] - v[i]);
      return s;
    }
    case DispersionKind::SquaredGaps: {
      double s = 0.0;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        const double g = v[i + 1] - v[i];
        s += g * g;
      }
      return s;
    }
    case DispersionKind::MaxGap: {
      double m = 0.0;
      for (std::size_t i = 0; i + 1 < n; ++i) m = std::max(m, v[i + 1] - v[i]);
      return m;
    }
    case DispersionKind::CoefficientOfVariation: {
      double mean = 0.0;
      for (double x : v) mean += x;
      mean /= static_cast<double>(n);
      if (mean == 0.0)
        throw ZeroMean("coefficient of variation undefined: mean is zero");
      double ss = 0.0;
      for (double x : v) ss += (x - mean) * (x - mean);
      const double sd = std::sqrt(ss / static_cast<double>(n - 1));
      return sd / std::abs(mean);
    }
  }
  throw InvalidSpec("unknown dispersion kind");
}

DispersionDelta::DispersionDelta(DispersionKind kind, std::vector<double> others)
    : kind_(kind), sorted_(std::move(others)) {
  if (sorted_.empty())
    throw InsufficientData("dispersion delta needs at least 1 fixed value");
  std::sort(sorted_.begin(), sorted_.end());

  second_gap_ = -std::numeric_limits<double>::infinity();
  max_gap_ = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < sorted_.size(); ++i) {
    const double g = sorted_[i + 1] - sorted_[i];
    sum_sq_gaps_ += g * g;
    if (g > max_gap_) {
      second_gap_ = max_gap_;
      max_gap_ = g;
      max_gap_count_ = 1;
    } else if (g == max_gap_) {
      ++max_gap_count_;
    } else if (g > second_gap_) {
      second_gap_ = g;
    }
  }
  for (double x : sorted_) {
    sum_ += x;
    sum_sq_ += x * x;
  }
}

double DispersionDelta::with_candidate(double g) const {
  const std::size_t m = sorted_.size();  // union size is m + 1
  switch (kind_) {
    case DispersionKind::L1Gaps:
      return std::max(sorted_.back(), g) - std::min(sorted_.front(), g);
    case DispersionKind::SquaredGaps: {
      if (g <= sorted_.front()) {
        const double d = sorted_.front() - g;
        return sum_sq_gaps_ + d * d;
      }
      if (g >= sorted_.back()) {
        const double d = g - sorted_.back();
        return sum_sq_gaps_ + d * d;
      }
      const auto it = std::lower_bound(sorted_.begin(), sorted_.end(), g);
      const double b = *it;
      const double a = *(it - 1);
      const double lo = g - a;
      const double hi = b - g;
      return sum_sq_gaps_ - (b - a) * (b - a) + lo * lo + hi * hi;
    }
    case DispersionKind::MaxGap: {
      if (m == 1) return std::abs(g - sorted_.front());
      if (g <= sorted_.front()) return std::max(max_gap_, sorted_.front() - g);
      if (g >= sorted_.back()) return std::max(max_gap_, g - sorted_.back());
      const auto it = std::lower_bound(sorted_.begin(), sorted_.end(), g);
      const double b = *it;
      const double a = *(it - 1);
      // The gap (a, b) is split in two; every other gap survives.
      double rest;
      if (b - a < max_gap_) {
        rest = max_gap_;
      } else {
        rest = (max_gap_count_ >= 2) ? max_gap_ : second_gap_;
      }
      return std::max({rest, g - a, b - g});
    }
    case DispersionKind::CoefficientOfVariation:
      return cv_of(sum_ + g, sum_sq_ + g * g, m + 1);
  }
  throw InvalidSpec("unknown dispersion kind");
}

}  // namespace mpc
