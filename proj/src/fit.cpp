#include "mpc/fit.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <limits>
#include <string>

#include "mpc/errors.hpp"
#include "mpc/rng.hpp"

namespace mpc {

namespace {

void validate(const MpcConfig& config) {
  if (!(config.rho >= 0.0)) throw InvalidSpec("rho must be >= 0");
  if (config.grid_size < 16)
    throw InvalidSpec("grid_size must be >= 16, got " + std::to_string(config.grid_size));
  if (config.max_iterations < 1) throw InvalidSpec("max_iterations must be >= 1");
  if (!(config.rel_tolerance >= 0.0)) throw InvalidSpec("rel_tolerance must be >= 0");
}

Eigen::VectorXd rescale_unit(Eigen::VectorXd v) {
  const double lo = v.minCoeff();
  const double hi = v.maxCoeff();
  if (hi == lo)
    throw DegenerateData("projection indices collapse to a single value");
  return (v.array() - lo) / (hi - lo);
}

Eigen::VectorXd uniform_grid(int size) {
  Eigen::VectorXd g(size);
  for (int k = 0; k < size; ++k)
    g[k] = static_cast<double>(k) / static_cast<double>(size - 1);
  return g;
}

}  // namespace

Eigen::VectorXd initialize_lambda(const PointCloud& cloud, const InitSpec& init,
                                  std::uint64_t seed) {
  const Eigen::Index n = cloud.n();
  if (n < 4)
    throw InsufficientData("fit needs at least 4 points, got " + std::to_string(n));

  switch (init.kind) {
    case InitKind::FirstPrincipalComponent: {
      const Eigen::MatrixXd centered = cloud.data.rowwise() - cloud.data.colwise().mean();
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
      Eigen::VectorXd v = svd.matrixV().col(0);
      // fix the sign so the direction is deterministic across platforms
      Eigen::Index lead;
      v.cwiseAbs().maxCoeff(&lead);
      if (v[lead] < 0.0) v = -v;
      return rescale_unit(centered * v);
    }
    case InitKind::Coordinate: {
      if (init.coordinate < 0 || init.coordinate >= cloud.p())
        throw InvalidSpec("init coordinate " + std::to_string(init.coordinate) +
                          " out of range for p = " + std::to_string(cloud.p()));
      return rescale_unit(cloud.data.col(init.coordinate));
    }
    case InitKind::Random: {
      Rng rng(seed);
      Eigen::VectorXd v(n);
      for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.uniform();
      return v;
    }
  }
  throw InvalidSpec("unknown init kind");
}

double objective(const MpcConfig& config, const PointCloud& cloud, const CurveModel& curve,
                 Eigen::Ref<const Eigen::VectorXd> lambdas) {
  const Eigen::Index n = cloud.n();
  if (lambdas.size() != n)
    throw DimensionMismatch("lambda count " + std::to_string(lambdas.size()) +
                            " does not match point count " + std::to_string(n));
  if (curve.p() != cloud.p())
    throw DimensionMismatch("curve dimension " + std::to_string(curve.p()) +
                            " does not match data dimension " + std::to_string(cloud.p()));

  double mean_dist = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd yhat = curve.at(lambdas[i]);
    mean_dist += evaluate_metric(config.metric, cloud.data.row(i).transpose(), yhat);
  }
  mean_dist /= static_cast<double>(n);
  if (config.rho == 0.0) return mean_dist;
  return mean_dist + config.rho * evaluate_dispersion(config.dispersion, lambdas);
}

double project_point(const MpcConfig& config, const CurveModel& curve,
                     Eigen::Ref<const Eigen::VectorXd> y,
                     Eigen::Ref<const Eigen::VectorXd> grid,
                     Eigen::Ref<const Eigen::VectorXd> lambdas, Eigen::Index index) {
  const Eigen::Index n = lambdas.size();
  if (index < 0 || index >= n)
    throw InvalidSpec("projection index " + std::to_string(index) + " out of range");
  for (Eigen::Index k = 1; k < grid.size(); ++k)
    if (!(grid[k] > grid[k - 1]))
      throw InvalidSpec("projection grid must be strictly increasing");

  Eigen::VectorXd candidate = lambdas;
  double best_value = std::numeric_limits<double>::infinity();
  double best_g = grid[0];
  const double inv_n = 1.0 / static_cast<double>(n);
  for (Eigen::Index k = 0; k < grid.size(); ++k) {
    const double g = grid[k];
    candidate[index] = g;
    double value = inv_n * evaluate_metric(config.metric, y, curve.at(g));
    if (config.rho != 0.0)
      value += config.rho * evaluate_dispersion(config.dispersion, candidate);
    if (value < best_value) {
      best_value = value;
      best_g = g;
    }
  }
  return best_g;
}

MpcFit fit(const MpcConfig& config, const PointCloud& cloud) {
  validate(config);
  const Eigen::Index n = cloud.n();
  const Eigen::Index p = cloud.p();
  if (n < 4)
    throw InsufficientData("fit needs at least 4 points, got " + std::to_string(n));
  if (p < 1) throw InsufficientData("fit needs at least 1 coordinate");

  Eigen::VectorXd lambda = initialize_lambda(cloud, config.init, config.seed);
  Rng sweep_rng(config.seed);
  const Eigen::VectorXd grid = uniform_grid(config.grid_size);
  const Eigen::MatrixXd points_t = cloud.data.transpose();  // column i is Y_i

  std::vector<double> trace;
  trace.reserve(static_cast<std::size_t>(config.max_iterations));
  bool converged = false;
  double prev = std::numeric_limits<double>::infinity();
  const double inv_n = 1.0 / static_cast<double>(n);

  for (int iter = 0; iter < config.max_iterations; ++iter) {
    const CurveModel curve = fit_curve(config.estimation_smoother, lambda, cloud);
    const Eigen::MatrixXd samples = curve.sample(grid);  // p x grid_size

    const std::vector<int> order = sweep_rng.permutation(static_cast<int>(n));
    std::vector<double> others(static_cast<std::size_t>(n) - 1);
    for (int i : order) {
      auto out = others.begin();
      for (Eigen::Index j = 0; j < n; ++j)
        if (j != i) *out++ = lambda[j];

      // the candidate value decomposes into the metric term plus the penalty
      // of {others + candidate}; the penalty is evaluated incrementally
      std::optional<DispersionDelta> delta;
      if (config.rho != 0.0) delta.emplace(config.dispersion.kind, others);
      const auto value_at = [&](double g, const Eigen::VectorXd& curve_point) {
        double v = inv_n * evaluate_metric(config.metric, points_t.col(i), curve_point);
        if (delta) v += config.rho * delta->with_candidate(g);
        return v;
      };

      const double current = value_at(lambda[i], curve.at(lambda[i]));
      double best_value = std::numeric_limits<double>::infinity();
      Eigen::Index best_k = 0;
      for (Eigen::Index k = 0; k < grid.size(); ++k) {
        const double v = value_at(grid[k], samples.col(k));
        if (v < best_value) {
          best_value = v;
          best_k = k;
        }
      }
      // accept only strict improvements so the sweep never increases the
      // objective; the incumbent may sit off-grid and already be optimal
      if (best_value < current) lambda[i] = grid[best_k];
    }

    lambda = rescale_unit(std::move(lambda));
    const double obj = objective(config, cloud, curve, lambda);
    trace.push_back(obj);
    if (!std::isfinite(obj))
      throw NonFiniteObjective("objective became non-finite at iteration " +
                               std::to_string(iter + 1), trace);
    if (std::abs(prev - obj) < config.rel_tolerance * std::max(std::abs(prev), 1e-12)) {
      converged = true;
      break;
    }
    prev = obj;
  }

  CurveModel final_curve = fit_curve(config.estimation_smoother, lambda, cloud);
  const int iterations = static_cast<int>(trace.size());
  return MpcFit{std::move(lambda), std::move(final_curve), std::move(trace), converged,
                iterations};
}

Curve predict_curve(const MpcConfig& config, const PointCloud& cloud, const MpcFit& result,
                    int m) {
  if (m < 2) throw InvalidSpec("curve sampling needs m >= 2, got " + std::to_string(m));
  const CurveModel curve = fit_curve(config.prediction_smoother, result.lambdas, cloud);
  Curve out;
  out.lambdas = uniform_grid(m);
  out.points = curve.sample(out.lambdas).transpose();
  return out;
}

}  // namespace mpc
