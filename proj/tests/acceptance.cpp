// Release gate: every check prints one PASS/FAIL line and the exit code is
// the number of failures. argv[1] names the CLI binary exercised by the
// determinism check.
#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "mpc/datasets.hpp"
#include "mpc/dispersion.hpp"
#include "mpc/eval.hpp"
#include "mpc/fit.hpp"
#include "mpc/geodesics.hpp"
#include "mpc/metrics.hpp"
#include "mpc/rng.hpp"
#include "mpc/run_config.hpp"
#include "mpc/smoothers.hpp"

namespace {

using namespace mpc;

struct Outcome {
  bool pass = false;
  std::string detail;
};

Eigen::VectorXd random_vector(Rng& rng, int d, double lo, double hi) {
  Eigen::VectorXd v(d);
  for (int i = 0; i < d; ++i) v[i] = rng.uniform(lo, hi);
  return v;
}

std::string format_count(const char* fmt, ...) {
  char buf[160];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, args);
  va_end(args);
  return buf;
}

Outcome metric_axioms() {
  Rng rng(401);
  const int d = 5;
  const double tol = 1e-12;
  const std::vector<std::string> all = {"l1",        "l2",       "lp:1.5",
                                        "lp:3",      "chebyshev", "canberra",
                                        "hellinger", "mahalanobis:1,2,0.5,1,4"};
  const std::vector<std::string> triangle = {
      "l1", "l2", "lp:1.5", "lp:3", "chebyshev", "mahalanobis:1,2,0.5,1,4"};
  std::vector<MetricSpec> all_specs, triangle_specs;
  for (const auto& name : all) all_specs.push_back(parse_metric(name));
  for (const auto& name : triangle) triangle_specs.push_back(parse_metric(name));
  const MetricSpec identity_mahal = parse_metric("mahalanobis:1,1,1,1,1");
  const MetricSpec plain_l2 = parse_metric("l2");

  for (int trial = 0; trial < 1200; ++trial) {
    const Eigen::VectorXd x = random_vector(rng, d, 0.1, 3.0);
    const Eigen::VectorXd y = random_vector(rng, d, 0.1, 3.0);
    const Eigen::VectorXd z = random_vector(rng, d, 0.1, 3.0);
    for (std::size_t m = 0; m < all_specs.size(); ++m) {
      const MetricSpec& spec = all_specs[m];
      if (std::abs(evaluate_metric(spec, x, y) - evaluate_metric(spec, y, x)) > tol)
        return {false, all[m] + " is asymmetric"};
      if (evaluate_metric(spec, x, x) > tol)
        return {false, all[m] + " has d(x,x) > 0"};
    }
    for (std::size_t m = 0; m < triangle_specs.size(); ++m) {
      const MetricSpec& spec = triangle_specs[m];
      const double slack = evaluate_metric(spec, x, z) -
                           evaluate_metric(spec, x, y) -
                           evaluate_metric(spec, y, z);
      if (slack > tol) return {false, triangle[m] + " breaks the triangle inequality"};
    }
    if (std::abs(evaluate_metric(identity_mahal, x, y) -
                 evaluate_metric(plain_l2, x, y)) > tol)
      return {false, "identity-precision mahalanobis differs from l2"};
  }
  return {true, "1200 triples, 8 metrics"};
}

Outcome dispersion_identities() {
  Rng rng(402);
  const double tol = 1e-12;
  const DispersionSpec l1g = parse_dispersion("l1_gaps");
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(39));
    const Eigen::VectorXd v = random_vector(rng, n, -5.0, 5.0);
    if (std::abs(evaluate_dispersion(l1g, v) - (v.maxCoeff() - v.minCoeff())) > tol)
      return {false, "l1_gaps differs from the range"};
  }

  const std::vector<std::string> gap_kinds = {"l1_gaps", "squared_gaps", "max_gap"};
  const DispersionSpec cv = parse_dispersion("cv");
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(19));
    const Eigen::VectorXd v = random_vector(rng, n, -5.0, 5.0);
    const double c = rng.uniform(-3.0, 3.0);
    const double a = rng.uniform(-2.5, 2.5);
    for (const auto& name : gap_kinds) {
      const DispersionSpec spec = parse_dispersion(name);
      const double base = evaluate_dispersion(spec, v);
      const Eigen::VectorXd shifted = v.array() + c;
      if (std::abs(evaluate_dispersion(spec, shifted) - base) > tol)
        return {false, name + " moves under translation"};
      const double factor = (name == "squared_gaps") ? a * a : std::abs(a);
      const Eigen::VectorXd scaled = a * v;
      if (std::abs(evaluate_dispersion(spec, scaled) - factor * base) >
          tol * (1.0 + factor * base))
        return {false, name + " scale factor is off"};
    }

    const Eigen::VectorXd pos = random_vector(rng, n, 0.5, 5.0);
    const double s = rng.uniform(0.1, 4.0);
    const double cv_base = evaluate_dispersion(cv, pos);
    const Eigen::VectorXd cv_scaled = s * pos;
    if (std::abs(evaluate_dispersion(cv, cv_scaled) - cv_base) > tol * (1.0 + cv_base))
      return {false, "cv moves under positive scaling"};

    const auto perm = rng.permutation(n);
    Eigen::VectorXd shuffled(n), pos_shuffled(n);
    for (int i = 0; i < n; ++i) {
      shuffled[i] = v[perm[static_cast<std::size_t>(i)]];
      pos_shuffled[i] = pos[perm[static_cast<std::size_t>(i)]];
    }
    for (const auto& name : gap_kinds) {
      const DispersionSpec spec = parse_dispersion(name);
      if (evaluate_dispersion(spec, shuffled) != evaluate_dispersion(spec, v))
        return {false, name + " is order sensitive"};
    }
    if (evaluate_dispersion(cv, pos_shuffled) != evaluate_dispersion(cv, pos))
      return {false, "cv is order sensitive"};
  }

  Eigen::VectorXd probe(3);
  probe << 0.1, 0.5, 0.9;
  const Eigen::VectorXd probe_shifted = probe.array() + 10.0;
  if (std::abs(evaluate_dispersion(cv, probe_shifted) -
               evaluate_dispersion(cv, probe)) < 1e-6)
    return {false, "cv unexpectedly survives translation"};
  return {true, "range identity and invariance table hold"};
}

Outcome smoother_oracles() {
  // near-zero ridge interpolates, and agrees with a dense solve of the same
  // kernel system
  Eigen::VectorXd xs(5), ys(5);
  xs << 0.05, 0.3, 0.45, 0.8, 0.95;
  ys << 1.2, -0.4, 2.5, 0.7, -1.1;
  const double ls = 0.15, alpha = 1e-10;
  const SmootherModel krr =
      fit_smoother(parse_smoother("kernel_ridge:1e-10,0.15"), xs, ys);
  Eigen::MatrixXd gram(5, 5);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      gram(i, j) =
          std::exp(-(xs[i] - xs[j]) * (xs[i] - xs[j]) / (2.0 * ls * ls));
  const Eigen::VectorXd dual =
      (gram + alpha * Eigen::MatrixXd::Identity(5, 5)).fullPivLu().solve(ys);
  for (int i = 0; i < 5; ++i)
    if (std::abs(krr.predict(xs[i]) - ys[i]) > 1e-5)
      return {false, "kernel ridge does not interpolate"};
  for (int k = 0; k <= 30; ++k) {
    const double x = 0.05 + 0.03 * k;
    double oracle = 0.0;
    for (int j = 0; j < 5; ++j)
      oracle += dual[j] * std::exp(-(x - xs[j]) * (x - xs[j]) / (2.0 * ls * ls));
    if (std::abs(krr.predict(x) - oracle) > 1e-5)
      return {false, "kernel ridge drifts from the dense solve"};
  }

  Eigen::VectorXd lin_x(12), lin_y(12);
  for (int i = 0; i < 12; ++i) {
    lin_x[i] = i / 11.0;
    lin_y[i] = 2.0 * lin_x[i] - 0.7;
  }
  for (const char* name : {"lowess:0.5", "spline:1"}) {
    const SmootherModel m = fit_smoother(parse_smoother(name), lin_x, lin_y);
    for (int k = 0; k <= 20; ++k) {
      const double x = 0.05 * k;
      if (std::abs(m.predict(x) - (2.0 * x - 0.7)) > 1e-6)
        return {false, std::string(name) + " bends a straight line"};
    }
  }

  Eigen::VectorXd bumpy(12);
  bumpy << 0.3, -1.2, 2.2, 0.4, 1.9, -0.8, 0.0, 1.1, -2.0, 0.6, 1.4, -0.5;
  const SmootherModel nw = fit_smoother(parse_smoother("nw:1e6"), lin_x, bumpy);
  const double mean = bumpy.mean();
  for (int k = 0; k <= 10; ++k)
    if (std::abs(nw.predict(0.1 * k) - mean) > 1e-9)
      return {false, "wide-bandwidth nadaraya-watson is not the mean"};
  return {true, "interpolation, linearity and flat limits hold"};
}

Outcome spiral_ordering() {
  int good_tau = 0;
  int monotone = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    GeneratorSpec gen;
    gen.kind = DatasetKind::Spiral;
    gen.seed = seed;
    const PointCloud cloud = generate(gen);
    MpcConfig config;
    config.estimation_smoother = parse_smoother("lowess:5");
    config.prediction_smoother = parse_smoother("lowess:0.4");
    config.init = parse_init("coordinate:0");
    const MpcFit result = fit(config, cloud);
    const double tau =
        std::abs(kendall_tau(result.lambdas, *cloud.ground_truth_t));
    if (tau >= 0.9) ++good_tau;
    if (result.objective_trace.back() <= result.objective_trace.front())
      ++monotone;
  }
  return {good_tau >= 4 && monotone == 5,
          format_count("|tau| >= 0.9 on %d/5 seeds, objective fell on %d/5",
                       good_tau, monotone)};
}

Outcome benchmark_reconstruction() {
  const auto run = [](DatasetKind kind, bool project, const char* estimation,
                      int& good, bool& in_range, double& secs) {
    const auto t0 = std::chrono::steady_clock::now();
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      GeneratorSpec gen;
      gen.kind = kind;
      gen.seed = seed;
      PointCloud cloud = generate(gen);
      if (project) {
        // the branching cloud is scored on its two stochastic coordinates:
        // the first is affine in t, and the two strokes overlap there, so no
        // single curve through the full space can track both
        PointCloud trimmed;
        trimmed.data = cloud.data.rightCols(2);
        trimmed.ground_truth_t = cloud.ground_truth_t;
        cloud = std::move(trimmed);
      }
      MpcConfig config;
      config.estimation_smoother = parse_smoother(estimation);
      const MpcFit result = fit(config, cloud);
      if (result.lambdas.minCoeff() < 0.0 || result.lambdas.maxCoeff() > 1.0)
        in_range = false;
      const Curve sampled = predict_curve(config, cloud, result, 200);
      const EvalReport report = evaluate_fit(config, cloud, result, sampled);
      if (report.rmse <= 0.3) ++good;
    }
    secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
               .count();
  };

  int seven_good = 0, bridge_good = 0;
  bool in_range = true;
  double seven_secs = 0.0, bridge_secs = 0.0;
  run(DatasetKind::Seven, true, "spline:1", seven_good, in_range, seven_secs);
  run(DatasetKind::Bridge, false, "kernel_ridge:10", bridge_good, in_range,
      bridge_secs);
  const bool pass = seven_good >= 4 && bridge_good >= 4 && in_range &&
                    seven_secs < 60.0 && bridge_secs < 60.0;
  return {pass, format_count("rmse <= 0.3 on %d/5 seven and %d/5 bridge seeds",
                             seven_good, bridge_good)};
}

Outcome collinear_exactness() {
  PointCloud cloud;
  cloud.data.resize(10, 3);
  Eigen::VectorXd truth(10);
  for (int i = 0; i < 10; ++i) {
    const double s = i / 9.0;
    truth[i] = s;
    cloud.data.row(i) << 1.0 + 3.0 * s, 2.0 + 2.0 * s, 3.0 + 1.0 * s;
  }
  cloud.ground_truth_t = truth;
  const std::vector<std::string> metrics = {
      "l1",       "l2",        "lp:3",     "chebyshev",
      "canberra", "hellinger", "mahalanobis:1,2,0.5"};
  const std::vector<std::string> dispersions = {"l1_gaps", "squared_gaps",
                                                "max_gap", "cv"};
  int combos = 0;
  for (const auto& mname : metrics)
    for (const auto& dname : dispersions) {
      MpcConfig config;
      config.metric = parse_metric(mname);
      config.dispersion = parse_dispersion(dname);
      const MpcFit result = fit(config, cloud);
      const Curve sampled = predict_curve(config, cloud, result, 100);
      const EvalReport report = evaluate_fit(config, cloud, result, sampled);
      if (report.rmse >= 1e-3)
        return {false, mname + " x " + dname + " misses the line"};
      if (!report.kendall_tau_abs.has_value() || *report.kendall_tau_abs != 1.0)
        return {false, mname + " x " + dname + " scrambles the order"};
      ++combos;
    }
  return {true, format_count("%d metric x dispersion pairs recover the line",
                             combos)};
}

Outcome geodesic_checks() {
  Rng rng(407);
  const MetricField flat = MetricField::euclidean(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd x = random_vector(rng, 3, -2.0, 2.0);
    Eigen::VectorXd y = random_vector(rng, 3, -2.0, 2.0);
    if ((y - x).norm() < 0.1) y[0] += 1.0;
    const GeodesicPath path = shoot_geodesic(flat, x, y, 64, 30);
    if (std::abs(metric_length(flat, path) - (y - x).norm()) > 1e-8)
      return {false, "flat shooting length drifts from the chord"};
  }

  // along the first axis the exponential field obeys x'' = -rate * (x')^2,
  // which integrates to x(t) = x0 + log(1 + rate * v0 * t) / rate
  const MetricField conf = MetricField::conformal(2, 1.0);
  const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(2);
  Eigen::VectorXd v0 = Eigen::VectorXd::Zero(2);
  v0[0] = 1.0;
  const GeodesicPath on_axis = integrate_geodesic(conf, x0, v0, 256);
  for (Eigen::Index k = 0; k < on_axis.times.size(); ++k) {
    const double want = std::log1p(on_axis.times[k]);
    if (std::abs(on_axis.positions(k, 0) - want) > 1e-6 ||
        std::abs(on_axis.positions(k, 1)) > 1e-9)
      return {false, "conformal axis geodesic leaves the closed form"};
  }

  Eigen::VectorXd target = Eigen::VectorXd::Zero(2);
  target[0] = 0.5;
  const GeodesicPath shot = shoot_geodesic(conf, x0, target, 256, 30);
  if (std::abs(shot.velocities(0, 0) - (std::exp(0.5) - 1.0)) > 1e-6)
    return {false, "conformal shooting misses the closed-form velocity"};

  // halving the step should cut the endpoint error 16x; 8x allows margin
  std::vector<double> errors;
  for (const int steps : {32, 64, 128}) {
    const GeodesicPath p = integrate_geodesic(conf, x0, v0, steps);
    errors.push_back(
        std::abs(p.positions(p.positions.rows() - 1, 0) - std::log(2.0)));
  }
  if (errors[0] / errors[1] < 8.0 || errors[1] / errors[2] < 8.0)
    return {false, "step halving gains less than 8x"};
  return {true, "chord lengths, closed forms and 4th-order decay hold"};
}

std::string read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

Outcome cli_determinism(const std::string& cli) {
  if (cli.empty()) return {false, "no CLI binary supplied on the command line"};
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "mpc_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string data = (dir / "data.csv").string();
  const std::string report = (dir / "fit.json").string();
  const std::string curve = (dir / "curve.csv").string();
  const std::string figure = (dir / "figure.svg").string();
  const std::vector<std::string> commands = {
      cli + " generate --kind spiral --n 60 --sigma 0.1 --seed 11 --out " + data,
      cli + " fit --in " + data + " --out " + report + " --curve-out " + curve +
          " --grid-size 128 --max-iterations 20",
      cli + " plot --fit " + report + " --in " + data + " --out " + figure,
  };
  const auto run_all = [&commands]() {
    for (const auto& command : commands)
      if (std::system((command + " > /dev/null 2>&1").c_str()) != 0) return false;
    return true;
  };

  if (!run_all()) return {false, "first pipeline run failed"};
  const std::vector<std::string> paths = {data, report, curve, figure};
  std::vector<std::string> first;
  for (const auto& path : paths) {
    first.push_back(read_bytes(path));
    if (first.back().empty()) return {false, path + " is empty"};
    fs::remove(path);
  }
  if (!run_all()) return {false, "second pipeline run failed"};
  for (std::size_t k = 0; k < paths.size(); ++k)
    if (read_bytes(paths[k]) != first[k])
      return {false, paths[k] + " differs between identical runs"};
  fs::remove_all(dir);
  return {true, "csv, json and svg bytes repeat exactly"};
}

Outcome rank_correlation_oracle() {
  Rng rng(409);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(59));
    Eigen::VectorXd a(n), b(n);
    for (int i = 0; i < n; ++i) {
      a[i] = rng.bernoulli(0.5) ? 0.5 * static_cast<double>(rng.below(5))
                                : rng.uniform(0.0, 2.0);
      b[i] = rng.bernoulli(0.5) ? 0.5 * static_cast<double>(rng.below(5))
                                : rng.uniform(0.0, 2.0);
    }
    std::int64_t concordant = 0, discordant = 0, ties_a = 0, ties_b = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        if (a[i] == a[j]) ++ties_a;
        if (b[i] == b[j]) ++ties_b;
        if (a[i] != a[j] && b[i] != b[j]) {
          if ((a[i] < a[j]) == (b[i] < b[j]))
            ++concordant;
          else
            ++discordant;
        }
      }
    const std::int64_t n0 = static_cast<std::int64_t>(n) * (n - 1) / 2;
    const std::int64_t denom_a = n0 - ties_a;
    const std::int64_t denom_b = n0 - ties_b;
    const double want =
        (denom_a == 0 || denom_b == 0)
            ? 0.0
            : static_cast<double>(concordant - discordant) /
                  std::sqrt(static_cast<double>(denom_a) *
                            static_cast<double>(denom_b));
    if (kendall_tau(a, b) != want)
      return {false, format_count("trial %d disagrees with the pair counts",
                                  trial)};
  }
  return {true, "100 tied vector pairs match bit for bit"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  struct Entry {
    const char* label;
    double budget_secs;  // 0 = unbudgeted
    std::function<Outcome()> run;
  };
  const std::vector<Entry> entries = {
      {"metric axioms", 5.0, metric_axioms},
      {"dispersion identities", 0.0, dispersion_identities},
      {"smoother oracles", 0.0, smoother_oracles},
      {"spiral ordering recovery", 60.0, spiral_ordering},
      {"benchmark reconstruction error", 120.0, benchmark_reconstruction},
      {"collinear exactness", 10.0, collinear_exactness},
      {"geodesic integration", 10.0, geodesic_checks},
      {"pipeline determinism", 0.0, [&cli] { return cli_determinism(cli); }},
      {"rank correlation oracle", 0.0, rank_correlation_oracle},
  };

  int failures = 0;
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = entries[k].run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("threw: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    if (entries[k].budget_secs > 0.0 && secs > entries[k].budget_secs) {
      outcome.pass = false;
      outcome.detail += " [over time budget]";
    }
    if (!outcome.pass) ++failures;
    std::printf("%s  %zu/9  %-32s %6.2fs  %s\n", outcome.pass ? "PASS" : "FAIL",
                k + 1, entries[k].label, secs, outcome.detail.c_str());
  }
  std::printf("%d/9 checks passed\n", 9 - failures);
  return failures == 0 ? 0 : 1;
}
