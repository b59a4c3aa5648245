// Dispersion penalties over the order statistics of projection indices.
#pragma once

#include <Eigen/Core>
#include <vector>

namespace mpc {

enum class DispersionKind { L1Gaps, SquaredGaps, MaxGap, CoefficientOfVariation };

struct DispersionSpec {
  DispersionKind kind = DispersionKind::L1Gaps;
};

// phi({lambda_i}) computed on a sorted copy. Requires n >= 2.
double evaluate_dispersion(const DispersionSpec& spec,
                           Eigen::Ref<const Eigen::VectorXd> lambdas);

// Incremental form used by the coordinate-descent sweep: fix n-1 values and
// evaluate the dispersion of {others union {g}} for many candidates g without
// re-sorting. Agrees with evaluate_dispersion up to rounding.
class DispersionDelta {
 public:
  DispersionDelta(DispersionKind kind, std::vector<double> others);

  // Dispersion of the n values formed by appending g to the fixed set.
  double with_candidate(double g) const;

 private:
  DispersionKind kind_;
  std::vector<double> sorted_;   // the fixed values, ascending
  double sum_sq_gaps_ = 0.0;     // for SquaredGaps
  double max_gap_ = 0.0;         // largest consecutive gap
  int max_gap_count_ = 0;        // multiplicity of max_gap_
  double second_gap_ = 0.0;      // largest gap once one max instance is removed
  double sum_ = 0.0;             // for CoefficientOfVariation
  double sum_sq_ = 0.0;
};

}  // namespace mpc
