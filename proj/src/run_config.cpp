#include "mpc/run_config.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "mpc/errors.hpp"

namespace mpc {

std::string format_value(double v) {
  char buf[40];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

namespace {

std::string trim(const std::string& text) {
  const auto begin = text.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = text.find_last_not_of(" \t\r");
  return text.substr(begin, end - begin + 1);
}

double parse_number(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double value = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing characters");
    return value;
  } catch (const std::exception&) {
    throw InvalidSpec(what + " expects a number, got '" + text + "'");
  }
}

long long parse_integer(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const long long value = std::stoll(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing characters");
    return value;
  } catch (const std::exception&) {
    throw InvalidSpec(what + " expects an integer, got '" + text + "'");
  }
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string::size_type start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    if (pos == std::string::npos) {
      parts.push_back(text.substr(start));
      return parts;
    }
    parts.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

// Splits "name:argument" at the first colon; arg stays empty without one.
void split_head(const std::string& text, std::string& name, std::string& arg) {
  const auto pos = text.find(':');
  if (pos == std::string::npos) {
    name = text;
    arg.clear();
  } else {
    name = text.substr(0, pos);
    arg = text.substr(pos + 1);
  }
}

std::vector<double> to_std(Eigen::Ref<const Eigen::VectorXd> v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

nlohmann::json eval_block(const EvalReport& report) {
  nlohmann::json e;
  e["rmse"] = report.rmse;
  e["mean_metric_distance"] = report.mean_metric_distance;
  e["curve_length"] = report.curve_length;
  e["objective_first"] = report.objective_first;
  e["objective_last"] = report.objective_last;
  if (report.kendall_tau_abs) e["kendall_tau_abs"] = *report.kendall_tau_abs;
  return e;
}

nlohmann::json meta_block(const MpcConfig& config, const std::string& input_path,
                          const PointCloud& cloud) {
  nlohmann::json meta;
  meta["artifact"] = kArtifactName;
  meta["version"] = kArtifactVersion;
  meta["input"] = input_path;
  meta["n"] = cloud.n();
  meta["p"] = cloud.p();
  meta["config"] = config_entries(config);
  return meta;
}

}  // namespace

MetricSpec parse_metric(const std::string& text) {
  std::string name, arg;
  split_head(text, name, arg);
  if (name == "l1" && arg.empty()) return MetricSpec::l1();
  if (name == "l2" && arg.empty()) return MetricSpec::l2();
  if (name == "chebyshev" && arg.empty()) return MetricSpec::chebyshev();
  if (name == "canberra" && arg.empty()) return MetricSpec::canberra();
  if (name == "hellinger" && arg.empty()) return MetricSpec::hellinger();
  if (name == "lp") return MetricSpec::lp(parse_number(arg, "lp order"));
  if (name == "mahalanobis") {
    const std::vector<std::string> cells = split(arg, ',');
    Eigen::MatrixXd precision =
        Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(cells.size()),
                              static_cast<Eigen::Index>(cells.size()));
    for (std::size_t j = 0; j < cells.size(); ++j)
      precision(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) =
          parse_number(trim(cells[j]), "mahalanobis diagonal entry");
    return MetricSpec::mahalanobis(precision);
  }
  throw InvalidSpec("unknown metric '" + text +
                    "'; expected l1, l2, lp:<order>, chebyshev, canberra, "
                    "hellinger, or mahalanobis:<diagonal>");
}

DispersionSpec parse_dispersion(const std::string& text) {
  if (text == "l1_gaps") return {DispersionKind::L1Gaps};
  if (text == "squared_gaps") return {DispersionKind::SquaredGaps};
  if (text == "max_gap") return {DispersionKind::MaxGap};
  if (text == "cv") return {DispersionKind::CoefficientOfVariation};
  throw InvalidSpec("unknown dispersion '" + text +
                    "'; expected l1_gaps, squared_gaps, max_gap, or cv");
}

SmootherSpec parse_smoother(const std::string& text) {
  std::string name, arg;
  split_head(text, name, arg);
  if (name == "spline") return SmootherSpec::spline(parse_number(arg, "spline penalty"));
  if (name == "lowess") {
    const std::vector<std::string> parts = split(arg, ',');
    if (parts.size() > 2) throw InvalidSpec("lowess takes bandwidth[,iterations]");
    const double bandwidth = parse_number(trim(parts[0]), "lowess bandwidth");
    int iterations = 0;
    if (parts.size() == 2) {
      const long long raw = parse_integer(trim(parts[1]), "lowess iterations");
      if (raw < 0 || raw > 100) throw InvalidSpec("lowess iterations out of range");
      iterations = static_cast<int>(raw);
    }
    return SmootherSpec::lowess(bandwidth, iterations);
  }
  if (name == "kernel_ridge") {
    const std::vector<std::string> parts = split(arg, ',');
    if (parts.size() > 2) throw InvalidSpec("kernel_ridge takes alpha[,lengthscale]");
    const double alpha = parse_number(trim(parts[0]), "kernel_ridge alpha");
    if (parts.size() == 2)
      return SmootherSpec::kernel_ridge(
          alpha, parse_number(trim(parts[1]), "kernel_ridge lengthscale"));
    return SmootherSpec::kernel_ridge(alpha);
  }
  if (name == "nw") return SmootherSpec::nadaraya_watson(parse_number(arg, "nw bandwidth"));
  throw InvalidSpec("unknown smoother '" + text +
                    "'; expected spline:<penalty>, lowess:<bandwidth>, "
                    "kernel_ridge:<alpha>[,<lengthscale>], or nw:<bandwidth>");
}

InitSpec parse_init(const std::string& text) {
  std::string name, arg;
  split_head(text, name, arg);
  if (name == "first_pc" && arg.empty()) return InitSpec::first_pc();
  if (name == "random" && arg.empty()) return InitSpec::random();
  if (name == "coordinate") {
    const long long axis = parse_integer(arg, "coordinate axis");
    if (axis < 0 || axis > 1'000'000) throw InvalidSpec("coordinate axis out of range");
    return InitSpec::coordinate_axis(static_cast<int>(axis));
  }
  throw InvalidSpec("unknown init '" + text +
                    "'; expected first_pc, coordinate:<axis>, or random");
}

std::string to_string(const MetricSpec& spec) {
  switch (spec.kind()) {
    case MetricKind::Lp:
      if (spec.lp_order() == 1.0) return "l1";
      if (spec.lp_order() == 2.0) return "l2";
      return "lp:" + format_value(spec.lp_order());
    case MetricKind::Chebyshev:
      return "chebyshev";
    case MetricKind::Canberra:
      return "canberra";
    case MetricKind::Hellinger:
      return "hellinger";
    case MetricKind::Mahalanobis: {
      const Eigen::MatrixXd& precision = spec.precision();
      for (Eigen::Index i = 0; i < precision.rows(); ++i)
        for (Eigen::Index j = 0; j < precision.cols(); ++j)
          if (i != j && precision(i, j) != 0.0)
            throw InvalidSpec(
                "only diagonal mahalanobis precision matrices have a spelling");
      std::string out = "mahalanobis:";
      for (Eigen::Index i = 0; i < precision.rows(); ++i) {
        if (i > 0) out += ',';
        out += format_value(precision(i, i));
      }
      return out;
    }
  }
  throw InvalidSpec("unhandled metric kind");
}

std::string to_string(const DispersionSpec& spec) {
  switch (spec.kind) {
    case DispersionKind::L1Gaps:
      return "l1_gaps";
    case DispersionKind::SquaredGaps:
      return "squared_gaps";
    case DispersionKind::MaxGap:
      return "max_gap";
    case DispersionKind::CoefficientOfVariation:
      return "cv";
  }
  throw InvalidSpec("unhandled dispersion kind");
}

std::string to_string(const SmootherSpec& spec) {
  switch (spec.kind) {
    case SmootherKind::SmoothingSpline:
      return "spline:" + format_value(spec.penalty);
    case SmootherKind::Lowess: {
      std::string out = "lowess:" + format_value(spec.bandwidth);
      if (spec.iterations > 0) out += ',' + std::to_string(spec.iterations);
      return out;
    }
    case SmootherKind::KernelRidge: {
      std::string out = "kernel_ridge:" + format_value(spec.alpha);
      if (spec.lengthscale) out += ',' + format_value(*spec.lengthscale);
      return out;
    }
    case SmootherKind::NadarayaWatson:
      return "nw:" + format_value(spec.bandwidth);
  }
  throw InvalidSpec("unhandled smoother kind");
}

std::string to_string(const InitSpec& spec) {
  switch (spec.kind) {
    case InitKind::FirstPrincipalComponent:
      return "first_pc";
    case InitKind::Coordinate:
      return "coordinate:" + std::to_string(spec.coordinate);
    case InitKind::Random:
      return "random";
  }
  throw InvalidSpec("unhandled init kind");
}

std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> entries;
  std::istringstream lines(text);
  std::string line;
  int row = 0;
  while (std::getline(lines, line)) {
    ++row;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ParseError("expected 'key = value'", row, 1);
    const std::string key = trim(stripped.substr(0, eq));
    if (key.empty()) throw ParseError("empty key", row, 1);
    entries[key] = trim(stripped.substr(eq + 1));
  }
  return entries;
}

std::map<std::string, std::string> load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file " + path);
  std::ostringstream content;
  content << in.rdbuf();
  try {
    return parse_key_values(content.str());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), e.row, e.col);
  }
}

void apply_fit_entries(MpcConfig& config,
                       const std::map<std::string, std::string>& entries) {
  for (const auto& [key, value] : entries) {
    if (key == "metric") {
      config.metric = parse_metric(value);
    } else if (key == "dispersion") {
      config.dispersion = parse_dispersion(value);
    } else if (key == "rho") {
      config.rho = parse_number(value, "rho");
    } else if (key == "estimation") {
      config.estimation_smoother = parse_smoother(value);
    } else if (key == "prediction") {
      config.prediction_smoother = parse_smoother(value);
    } else if (key == "init") {
      config.init = parse_init(value);
    } else if (key == "grid_size") {
      const long long raw = parse_integer(value, "grid_size");
      if (raw < 2 || raw > 1'000'000) throw InvalidSpec("grid_size out of range");
      config.grid_size = static_cast<int>(raw);
    } else if (key == "max_iterations") {
      const long long raw = parse_integer(value, "max_iterations");
      if (raw < 1 || raw > 1'000'000) throw InvalidSpec("max_iterations out of range");
      config.max_iterations = static_cast<int>(raw);
    } else if (key == "rel_tolerance") {
      config.rel_tolerance = parse_number(value, "rel_tolerance");
    } else if (key == "seed") {
      try {
        std::size_t used = 0;
        // stoull wraps negative input around instead of rejecting it
        if (value.find('-') != std::string::npos) throw std::invalid_argument("sign");
        config.seed = std::stoull(value, &used);
        if (used != value.size()) throw std::invalid_argument("trailing characters");
      } catch (const std::exception&) {
        throw InvalidSpec("seed expects an unsigned integer, got '" + value + "'");
      }
    } else {
      throw InvalidSpec("unknown config key '" + key + "'");
    }
  }
}

std::map<std::string, std::string> config_entries(const MpcConfig& config) {
  std::map<std::string, std::string> entries;
  entries["metric"] = to_string(config.metric);
  entries["dispersion"] = to_string(config.dispersion);
  entries["rho"] = format_value(config.rho);
  entries["estimation"] = to_string(config.estimation_smoother);
  entries["prediction"] = to_string(config.prediction_smoother);
  entries["init"] = to_string(config.init);
  entries["grid_size"] = std::to_string(config.grid_size);
  entries["max_iterations"] = std::to_string(config.max_iterations);
  entries["rel_tolerance"] = format_value(config.rel_tolerance);
  entries["seed"] = std::to_string(config.seed);
  return entries;
}

std::string fit_report_json(const MpcConfig& config, const std::string& input_path,
                            const PointCloud& cloud, const MpcFit& fit,
                            const EvalReport& report) {
  nlohmann::json doc;
  doc["meta"] = meta_block(config, input_path, cloud);
  nlohmann::json& f = doc["fit"];
  f["lambdas"] = to_std(fit.lambdas);
  f["objective_trace"] = fit.objective_trace;
  f["converged"] = fit.converged;
  f["iterations"] = fit.iterations_used;
  doc["eval"] = eval_block(report);
  return doc.dump(2) + "\n";
}

std::string eval_report_json(const EvalReport& report) {
  nlohmann::json doc;
  doc["eval"] = eval_block(report);
  return doc.dump(2) + "\n";
}

std::string fit_failure_json(const MpcConfig& config, const std::string& input_path,
                             const PointCloud& cloud, const std::string& message,
                             const std::vector<double>& partial_trace) {
  nlohmann::json doc;
  doc["meta"] = meta_block(config, input_path, cloud);
  doc["error"] = message;
  doc["fit"]["objective_trace"] = partial_trace;
  return doc.dump(2) + "\n";
}

std::string curve_csv(const Curve& curve) {
  std::string out = "lambda";
  for (Eigen::Index j = 0; j < curve.points.cols(); ++j)
    out += ",y" + std::to_string(j + 1);
  out += '\n';
  for (Eigen::Index k = 0; k < curve.lambdas.size(); ++k) {
    out += format_value(curve.lambdas[k]);
    for (Eigen::Index j = 0; j < curve.points.cols(); ++j)
      out += ',' + format_value(curve.points(k, j));
    out += '\n';
  }
  return out;
}

}  // namespace mpc
