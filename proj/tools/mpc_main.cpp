// Command-line front end: generate | fit | eval | plot | geodesic.
// Exit codes: 0 success, 2 usage, 3 input/output, 4 numerical failure.
#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mpc/datasets.hpp"
#include "mpc/errors.hpp"
#include "mpc/eval.hpp"
#include "mpc/fit.hpp"
#include "mpc/geodesics.hpp"
#include "mpc/run_config.hpp"
#include "mpc/svg.hpp"

namespace {

using namespace mpc;

int exit_code_for(const Error& e) {
  if (dynamic_cast<const InvalidSpec*>(&e) != nullptr ||
      dynamic_cast<const InsufficientData*>(&e) != nullptr ||
      dynamic_cast<const DimensionMismatch*>(&e) != nullptr)
    return 2;
  if (dynamic_cast<const IoError*>(&e) != nullptr ||
      dynamic_cast<const ParseError*>(&e) != nullptr ||
      dynamic_cast<const RaggedRows*>(&e) != nullptr)
    return 3;
  return 4;
}

DatasetKind parse_kind(const std::string& text) {
  if (text == "seven") return DatasetKind::Seven;
  if (text == "spiral") return DatasetKind::Spiral;
  if (text == "bridge") return DatasetKind::Bridge;
  throw InvalidSpec("unknown dataset kind '" + text +
                    "'; expected seven, spiral, or bridge");
}

Eigen::VectorXd parse_vector(const std::string& text, const std::string& what) {
  std::vector<double> values;
  std::string::size_type start = 0;
  while (start <= text.size()) {
    const auto pos = text.find(',', start);
    const std::string cell =
        text.substr(start, pos == std::string::npos ? pos : pos - start);
    try {
      std::size_t used = 0;
      values.push_back(std::stod(cell, &used));
      if (used != cell.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw InvalidSpec(what + " expects comma-separated numbers, got '" + text + "'");
    }
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  Eigen::VectorXd out(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i)
    out[static_cast<Eigen::Index>(i)] = values[i];
  return out;
}

// fit.json -> fit_curve.csv; extensionless paths just get the suffix.
std::string companion_curve_path(const std::string& out) {
  const auto slash = out.find_last_of('/');
  const auto dot = out.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
    return out + "_curve.csv";
  return out.substr(0, dot) + "_curve.csv";
}

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

// Rebuilds the fitted state a report describes against its input cloud.
struct RestoredFit {
  MpcConfig config;
  MpcFit fit;
};

RestoredFit restore_fit(const std::string& report_path, const PointCloud& cloud) {
  const nlohmann::json doc = load_json(report_path);
  try {
    std::map<std::string, std::string> entries;
    for (const auto& [key, value] : doc.at("meta").at("config").items())
      entries[key] = value.get<std::string>();
    MpcConfig config;
    apply_fit_entries(config, entries);

    const std::vector<double> raw = doc.at("fit").at("lambdas").get<std::vector<double>>();
    Eigen::VectorXd lambdas(static_cast<Eigen::Index>(raw.size()));
    for (std::size_t i = 0; i < raw.size(); ++i)
      lambdas[static_cast<Eigen::Index>(i)] = raw[i];

    MpcFit fit{lambdas, fit_curve(config.estimation_smoother, lambdas, cloud),
               doc.at("fit").at("objective_trace").get<std::vector<double>>(),
               doc.at("fit").at("converged").get<bool>(),
               doc.at("fit").at("iterations").get<int>()};
    return {std::move(config), std::move(fit)};
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(report_path + ": not a fit report: " + e.what());
  }
}

struct GenerateArgs {
  std::string kind = "spiral";
  int n = 120;
  double sigma = 0.1;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_generate(const GenerateArgs& args) {
  GeneratorSpec spec;
  spec.kind = parse_kind(args.kind);
  spec.n = args.n;
  spec.sigma = args.sigma;
  spec.seed = args.seed;
  const PointCloud cloud = generate(spec);
  save_csv(cloud, args.out);
  std::cout << "wrote " << cloud.n() << " points to " << args.out << "\n";
  return 0;
}

struct FitArgs {
  std::string in, out, curve_out, config_path;
  int samples = 200;
  std::map<std::string, std::string> overrides;
};

int cmd_fit(const FitArgs& args) {
  std::map<std::string, std::string> entries;
  if (!args.config_path.empty()) entries = load_config_file(args.config_path);
  for (const auto& [key, value] : args.overrides) entries[key] = value;

  MpcConfig config;
  apply_fit_entries(config, entries);
  if (args.samples < 2) throw InvalidSpec("--samples must be >= 2");

  const PointCloud cloud = load_csv(args.in);

  std::optional<MpcFit> result;
  try {
    result = fit(config, cloud);
  } catch (const NonFiniteObjective& e) {
    write_text_atomic(args.out,
                      fit_failure_json(config, args.in, cloud, e.what(), e.partial_trace));
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }

  const Curve sampled = predict_curve(config, cloud, *result, args.samples);
  const EvalReport report = evaluate_fit(config, cloud, *result, sampled);

  write_text_atomic(args.out, fit_report_json(config, args.in, cloud, *result, report));
  const std::string curve_path =
      args.curve_out.empty() ? companion_curve_path(args.out) : args.curve_out;
  write_text_atomic(curve_path, curve_csv(sampled));

  std::printf("objective %.6g -> %.6g after %d iterations (%s)", report.objective_first,
              report.objective_last, result->iterations_used,
              result->converged ? "converged" : "iteration cap");
  if (report.kendall_tau_abs) std::printf("; |tau| = %.3f", *report.kendall_tau_abs);
  std::printf("\n");
  return 0;
}

struct EvalArgs {
  std::string fit_path, in, out;
  int samples = 200;
};

int cmd_eval(const EvalArgs& args) {
  if (args.samples < 2) throw InvalidSpec("--samples must be >= 2");
  const PointCloud cloud = load_csv(args.in);
  RestoredFit restored = restore_fit(args.fit_path, cloud);
  const Curve sampled = predict_curve(restored.config, cloud, restored.fit, args.samples);
  const EvalReport report = evaluate_fit(restored.config, cloud, restored.fit, sampled);
  const std::string text = eval_report_json(report);
  std::cout << text;
  if (!args.out.empty()) write_text_atomic(args.out, text);
  return 0;
}

struct PlotArgs {
  std::string fit_path, in, out, axes;
  int samples = 200;
};

int cmd_plot(const PlotArgs& args) {
  if (args.samples < 2) throw InvalidSpec("--samples must be >= 2");
  const PointCloud cloud = load_csv(args.in);
  RestoredFit restored = restore_fit(args.fit_path, cloud);
  const Curve sampled = predict_curve(restored.config, cloud, restored.fit, args.samples);

  std::vector<std::pair<int, int>> pairs;
  if (args.axes.empty()) {
    pairs = default_axis_pairs(static_cast<int>(cloud.p()));
  } else {
    const Eigen::VectorXd axes = parse_vector(args.axes, "--axes");
    if (axes.size() != 2 || axes[0] != std::floor(axes[0]) || axes[1] != std::floor(axes[1]))
      throw InvalidSpec("--axes expects two integer columns, e.g. 2,3");
    pairs = {{static_cast<int>(axes[0]), static_cast<int>(axes[1])}};
  }

  write_text_atomic(args.out, render_panels(cloud, sampled, pairs));
  return 0;
}

struct GeodesicArgs {
  std::string field = "euclidean";
  std::string from, to, velocity, out;
  int dim = 0;
  int steps = 128;
  int max_newton = 20;
};

MetricField parse_field(const std::string& text, int dimension) {
  const auto colon = text.find(':');
  const std::string name = text.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (name == "euclidean" && arg.empty()) return MetricField::euclidean(dimension);
  if (name == "conformal") {
    try {
      std::size_t used = 0;
      const double rate = std::stod(arg, &used);
      if (used != arg.size()) throw std::invalid_argument("trailing characters");
      return MetricField::conformal(dimension, rate);
    } catch (const std::exception&) {
      throw InvalidSpec("conformal field expects a rate, got '" + arg + "'");
    }
  }
  if (name == "constant") {
    const Eigen::VectorXd diagonal = parse_vector(arg, "constant field diagonal");
    if (diagonal.size() != dimension)
      throw InvalidSpec("constant field diagonal has " + std::to_string(diagonal.size()) +
                        " entries for dimension " + std::to_string(dimension));
    return MetricField::constant(diagonal.asDiagonal());
  }
  throw InvalidSpec("unknown field '" + text +
                    "'; expected euclidean, constant:<diagonal>, or conformal:<rate>");
}

std::string path_csv(const GeodesicPath& path) {
  const Eigen::Index d = path.positions.cols();
  std::string out = "t";
  for (Eigen::Index j = 0; j < d; ++j) out += ",x" + std::to_string(j + 1);
  for (Eigen::Index j = 0; j < d; ++j) out += ",v" + std::to_string(j + 1);
  out += '\n';
  for (Eigen::Index k = 0; k < path.times.size(); ++k) {
    out += format_value(path.times[k]);
    for (Eigen::Index j = 0; j < d; ++j) out += ',' + format_value(path.positions(k, j));
    for (Eigen::Index j = 0; j < d; ++j) out += ',' + format_value(path.velocities(k, j));
    out += '\n';
  }
  return out;
}

int cmd_geodesic(const GeodesicArgs& args) {
  if (args.to.empty() == args.velocity.empty())
    throw InvalidSpec("pass exactly one of --to (boundary value) or --velocity (initial value)");

  const Eigen::VectorXd from = parse_vector(args.from, "--from");
  const int dimension = static_cast<int>(from.size());
  if (args.dim != 0 && args.dim != dimension)
    throw InvalidSpec("--dim " + std::to_string(args.dim) + " disagrees with --from (" +
                      std::to_string(dimension) + " coordinates)");

  const MetricField field = parse_field(args.field, dimension);
  GeodesicPath path;
  if (!args.to.empty()) {
    path = shoot_geodesic(field, from, parse_vector(args.to, "--to"), args.steps,
                          args.max_newton);
  } else {
    path = integrate_geodesic(field, from, parse_vector(args.velocity, "--velocity"),
                              args.steps);
  }

  std::cout << "length = " << format_value(metric_length(field, path)) << "\n";
  if (!args.out.empty()) write_text_atomic(args.out, path_csv(path));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"metric-based principal curves"};
  app.require_subcommand(1);

  GenerateArgs gen;
  CLI::App* gen_cmd = app.add_subcommand("generate", "draw a synthetic benchmark cloud");
  gen_cmd->add_option("--kind", gen.kind, "seven | spiral | bridge")->capture_default_str();
  gen_cmd->add_option("--n", gen.n, "sample size")->capture_default_str();
  gen_cmd->add_option("--sigma", gen.sigma, "noise standard deviation")
      ->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed, "generator seed")->capture_default_str();
  gen_cmd->add_option("--out", gen.out, "output CSV path")->required();

  FitArgs fit_args;
  std::map<std::string, std::string> flag_values;
  CLI::App* fit_cmd = app.add_subcommand("fit", "fit a principal curve to a CSV cloud");
  fit_cmd->add_option("--in", fit_args.in, "input CSV path")->required();
  fit_cmd->add_option("--out", fit_args.out, "output report path (JSON)")->required();
  fit_cmd->add_option("--curve-out", fit_args.curve_out,
                      "sampled curve CSV path (default: derived from --out)");
  fit_cmd->add_option("--config", fit_args.config_path, "key = value config file");
  fit_cmd->add_option("--samples", fit_args.samples, "curve sample count")
      ->capture_default_str();
  for (const char* key : {"metric", "dispersion", "rho", "estimation", "prediction",
                          "init", "grid_size", "max_iterations", "rel_tolerance", "seed"}) {
    std::string flag = "--" + std::string(key);
    for (auto& c : flag)
      if (c == '_') c = '-';
    fit_cmd->add_option(flag, flag_values[key], "overrides the config file");
  }

  EvalArgs eval_args;
  CLI::App* eval_cmd =
      app.add_subcommand("eval", "recompute the evaluation summary of a fit report");
  eval_cmd->add_option("--fit", eval_args.fit_path, "fit report path (JSON)")->required();
  eval_cmd->add_option("--in", eval_args.in, "the cloud the report was fit on")->required();
  eval_cmd->add_option("--out", eval_args.out, "optional JSON output path");
  eval_cmd->add_option("--samples", eval_args.samples, "curve sample count")
      ->capture_default_str();

  PlotArgs plot_args;
  CLI::App* plot_cmd = app.add_subcommand("plot", "draw the cloud and fitted curve as SVG");
  plot_cmd->add_option("--fit", plot_args.fit_path, "fit report path (JSON)")->required();
  plot_cmd->add_option("--in", plot_args.in, "the cloud the report was fit on")->required();
  plot_cmd->add_option("--out", plot_args.out, "output SVG path")->required();
  plot_cmd->add_option("--axes", plot_args.axes,
                       "1-based column pair, e.g. 2,3 (default: all pairs)");
  plot_cmd->add_option("--samples", plot_args.samples, "curve sample count")
      ->capture_default_str();

  GeodesicArgs geo;
  CLI::App* geo_cmd =
      app.add_subcommand("geodesic", "integrate a geodesic under a metric field");
  geo_cmd->add_option("--field", geo.field, "euclidean | constant:<diagonal> | conformal:<rate>")
      ->capture_default_str();
  geo_cmd->add_option("--from", geo.from, "start point, comma separated")->required();
  geo_cmd->add_option("--to", geo.to, "end point (boundary value problem)");
  geo_cmd->add_option("--velocity", geo.velocity, "initial velocity (initial value problem)");
  geo_cmd->add_option("--dim", geo.dim, "dimension check against --from");
  geo_cmd->add_option("--steps", geo.steps, "integration steps")->capture_default_str();
  geo_cmd->add_option("--max-newton", geo.max_newton, "shooting iteration cap")
      ->capture_default_str();
  geo_cmd->add_option("--out", geo.out, "optional path CSV output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (gen_cmd->parsed()) return cmd_generate(gen);
    if (fit_cmd->parsed()) {
      for (const auto& [key, value] : flag_values)
        if (!value.empty()) fit_args.overrides[key] = value;
      return cmd_fit(fit_args);
    }
    if (eval_cmd->parsed()) return cmd_eval(eval_args);
    if (plot_cmd->parsed()) return cmd_plot(plot_args);
    if (geo_cmd->parsed()) return cmd_geodesic(geo);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 2;
}
