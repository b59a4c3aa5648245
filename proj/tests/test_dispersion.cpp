#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <vector>

#include "mpc/dispersion.hpp"
#include "mpc/errors.hpp"
#include "mpc/rng.hpp"

using mpc::DispersionKind;
using mpc::DispersionSpec;
using mpc::evaluate_dispersion;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

Eigen::VectorXd random_vec(mpc::Rng& rng, int n, double lo, double hi) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.uniform(lo, hi);
  return v;
}

constexpr DispersionKind kAllKinds[] = {
    DispersionKind::L1Gaps, DispersionKind::SquaredGaps, DispersionKind::MaxGap,
    DispersionKind::CoefficientOfVariation};

constexpr DispersionKind kGapKinds[] = {
    DispersionKind::L1Gaps, DispersionKind::SquaredGaps, DispersionKind::MaxGap};

}  // namespace

TEST_CASE("worked examples") {
  CHECK(evaluate_dispersion({DispersionKind::L1Gaps}, vec({0.2, 0.9, 0.5})) ==
        doctest::Approx(0.7).epsilon(1e-14));
  CHECK(evaluate_dispersion({DispersionKind::SquaredGaps}, vec({0.2, 0.5, 0.9})) ==
        doctest::Approx(0.25).epsilon(1e-14));
  CHECK(evaluate_dispersion({DispersionKind::MaxGap}, vec({0.2, 0.5, 0.9})) ==
        doctest::Approx(0.4).epsilon(1e-14));
  CHECK(evaluate_dispersion({DispersionKind::CoefficientOfVariation}, vec({1, 2, 3})) ==
        doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("l1 gaps telescope to the range") {
  mpc::Rng rng(101);
  for (int rep = 0; rep < 1000; ++rep) {
    const int n = 2 + static_cast<int>(rng.below(40));
    const Eigen::VectorXd v = random_vec(rng, n, -50.0, 50.0);
    const double range = v.maxCoeff() - v.minCoeff();
    CHECK(std::abs(evaluate_dispersion({DispersionKind::L1Gaps}, v) - range) <= 1e-12);
  }
}

TEST_CASE("translation leaves gap kinds unchanged") {
  mpc::Rng rng(103);
  for (int rep = 0; rep < 200; ++rep) {
    const int n = 2 + static_cast<int>(rng.below(20));
    const Eigen::VectorXd v = random_vec(rng, n, -5.0, 5.0);
    const double c = rng.uniform(-100.0, 100.0);
    for (DispersionKind kind : kGapKinds) {
      const double base = evaluate_dispersion({kind}, v);
      const double shifted = evaluate_dispersion({kind}, (v.array() + c).matrix());
      CHECK(std::abs(base - shifted) <= 1e-10 * std::max(1.0, std::abs(base)));
    }
  }
}

TEST_CASE("scaling acts on each kind as its degree dictates") {
  mpc::Rng rng(107);
  for (int rep = 0; rep < 200; ++rep) {
    const int n = 2 + static_cast<int>(rng.below(20));
    const Eigen::VectorXd v = random_vec(rng, n, -5.0, 5.0);
    const double a = rng.uniform(-4.0, 4.0);
    const auto scaled = (v.array() * a).matrix();

    const double l1 = evaluate_dispersion({DispersionKind::L1Gaps}, v);
    const double mg = evaluate_dispersion({DispersionKind::MaxGap}, v);
    const double sq = evaluate_dispersion({DispersionKind::SquaredGaps}, v);
    CHECK(evaluate_dispersion({DispersionKind::L1Gaps}, scaled) ==
          doctest::Approx(std::abs(a) * l1).epsilon(1e-11));
    CHECK(evaluate_dispersion({DispersionKind::MaxGap}, scaled) ==
          doctest::Approx(std::abs(a) * mg).epsilon(1e-11));
    CHECK(evaluate_dispersion({DispersionKind::SquaredGaps}, scaled) ==
          doctest::Approx(a * a * sq).epsilon(1e-11));
  }
}

TEST_CASE("coefficient of variation scaling and translation behavior") {
  mpc::Rng rng(109);
  int translation_changes = 0;
  for (int rep = 0; rep < 200; ++rep) {
    const int n = 3 + static_cast<int>(rng.below(20));
    const Eigen::VectorXd v = random_vec(rng, n, 1.0, 5.0);  // positive mean
    const double cv = evaluate_dispersion({DispersionKind::CoefficientOfVariation}, v);

    const double a = rng.uniform(0.1, 10.0);
    const double scaled = evaluate_dispersion({DispersionKind::CoefficientOfVariation},
                                              (v.array() * a).matrix());
    CHECK(std::abs(scaled - cv) <= 1e-10 * std::max(1.0, cv));

    const double c = rng.uniform(1.0, 10.0);
    const double shifted = evaluate_dispersion({DispersionKind::CoefficientOfVariation},
                                               (v.array() + c).matrix());
    if (std::abs(shifted - cv) > 1e-6 * std::max(1.0, cv)) ++translation_changes;
  }
  // not translation-invariant: shifting must change the value essentially always
  CHECK(translation_changes >= 199);
}

TEST_CASE("permutation invariance") {
  mpc::Rng rng(113);
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 2 + static_cast<int>(rng.below(15));
    const Eigen::VectorXd v = random_vec(rng, n, 0.5, 9.0);
    Eigen::VectorXd shuffled(n);
    const std::vector<int> perm = rng.permutation(n);
    for (int i = 0; i < n; ++i) shuffled[i] = v[perm[static_cast<std::size_t>(i)]];
    for (DispersionKind kind : kAllKinds) {
      CHECK(evaluate_dispersion({kind}, v) == evaluate_dispersion({kind}, shuffled));
    }
  }
}

TEST_CASE("rejects degenerate inputs") {
  for (DispersionKind kind : kAllKinds) {
    CHECK_THROWS_AS(evaluate_dispersion({kind}, vec({0.5})), mpc::InsufficientData);
    CHECK_THROWS_AS(evaluate_dispersion({kind}, Eigen::VectorXd()), mpc::InsufficientData);
  }
  CHECK_THROWS_AS(evaluate_dispersion({DispersionKind::CoefficientOfVariation}, vec({-1.0, 1.0})),
                  mpc::ZeroMean);
  CHECK_THROWS_AS(evaluate_dispersion({DispersionKind::CoefficientOfVariation}, vec({0.0, 0.0, 0.0})),
                  mpc::ZeroMean);
}

TEST_CASE("incremental candidate evaluation matches a full recompute") {
  mpc::Rng rng(127);
  for (int rep = 0; rep < 300; ++rep) {
    const int m = 1 + static_cast<int>(rng.below(30));
    std::vector<double> others(static_cast<std::size_t>(m));
    for (auto& x : others) x = rng.uniform(0.05, 1.0);  // keeps CV means away from 0
    for (DispersionKind kind : kAllKinds) {
      const mpc::DispersionDelta delta(kind, others);
      for (int c = 0; c < 10; ++c) {
        const double g = rng.uniform(-0.2, 1.2);
        Eigen::VectorXd full(m + 1);
        for (int i = 0; i < m; ++i) full[i] = others[static_cast<std::size_t>(i)];
        full[m] = g;
        const double naive = evaluate_dispersion({kind}, full);
        const double fast = delta.with_candidate(g);
        CHECK(std::abs(fast - naive) <= 1e-12 * std::max(1.0, std::abs(naive)));
      }
    }
  }
}

TEST_CASE("incremental evaluation handles ties and repeated maxima") {
  // gaps 0.25, 0.25, 0.5, 0.5: the largest gap appears twice
  std::vector<double> others = {0.0, 0.25, 0.5, 1.0, 1.5};
  const mpc::DispersionDelta delta(mpc::DispersionKind::MaxGap, others);
  // splitting one of the two 0.5 gaps leaves the other intact
  CHECK(delta.with_candidate(0.75) == doctest::Approx(0.5).epsilon(1e-14));
  // splitting a 0.25 gap leaves 0.5 as the max
  CHECK(delta.with_candidate(0.125) == doctest::Approx(0.5).epsilon(1e-14));
  // candidate equal to an existing value creates a zero gap, max unchanged
  CHECK(delta.with_candidate(0.5) == doctest::Approx(0.5).epsilon(1e-14));
  // candidate outside the range can dominate
  CHECK(delta.with_candidate(3.0) == doctest::Approx(1.5).epsilon(1e-14));
}

TEST_CASE("incremental evaluation with a single fixed value") {
  const mpc::DispersionDelta delta(mpc::DispersionKind::MaxGap, {0.4});
  CHECK(delta.with_candidate(0.9) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(delta.with_candidate(0.1) == doctest::Approx(0.3).epsilon(1e-14));
  const mpc::DispersionDelta sq(mpc::DispersionKind::SquaredGaps, {0.4});
  CHECK(sq.with_candidate(0.9) == doctest::Approx(0.25).epsilon(1e-14));
}
