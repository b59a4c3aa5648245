// Textual spellings for fit specs, flat config files, and run reports.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "mpc/eval.hpp"
#include "mpc/fit.hpp"

namespace mpc {

inline constexpr const char* kArtifactName = "mpc";
inline constexpr const char* kArtifactVersion = "0.1.0";

// One-token spellings shared by config files and command-line flags:
//   metric      l1 | l2 | lp:<order> | chebyshev | canberra | hellinger |
//               mahalanobis:<precision diagonal, comma separated>
//   dispersion  l1_gaps | squared_gaps | max_gap | cv
//   smoother    spline:<penalty> | lowess:<bandwidth>[,<iterations>] |
//               kernel_ridge:<alpha>[,<lengthscale>] | nw:<bandwidth>
//   init        first_pc | coordinate:<axis> | random
MetricSpec parse_metric(const std::string& text);
DispersionSpec parse_dispersion(const std::string& text);
SmootherSpec parse_smoother(const std::string& text);
InitSpec parse_init(const std::string& text);

// Canonical spellings that parse back to an equivalent value. Mahalanobis
// metrics are spellable only with a diagonal precision matrix.
std::string to_string(const MetricSpec& spec);
std::string to_string(const DispersionSpec& spec);
std::string to_string(const SmootherSpec& spec);
std::string to_string(const InitSpec& spec);

// Flat "key = value" lines. '#' starts a comment, blank lines are skipped,
// whitespace around keys and values is trimmed, and a repeated key keeps its
// last value so later entries override earlier ones.
std::map<std::string, std::string> parse_key_values(const std::string& text);
std::map<std::string, std::string> load_config_file(const std::string& path);

// Applies the fit keys (metric, dispersion, rho, estimation, prediction,
// init, grid_size, max_iterations, rel_tolerance, seed) onto config.
// Unknown keys and malformed values raise InvalidSpec naming the offender.
void apply_fit_entries(MpcConfig& config,
                       const std::map<std::string, std::string>& entries);

// The resolved configuration as canonical spellings, ready to echo into a
// report or rewrite as a config file.
std::map<std::string, std::string> config_entries(const MpcConfig& config);

// JSON report for a completed fit: a meta block sufficient to re-run the fit
// bit-identically (artifact name and version, resolved config, input path
// and shape), the fitted indices with their objective trace, and the
// evaluation summary.
std::string fit_report_json(const MpcConfig& config, const std::string& input_path,
                            const PointCloud& cloud, const MpcFit& fit,
                            const EvalReport& report);

// Report for a run that aborted: the same meta block, the objective values
// recorded before the failure, and the error message in place of results.
std::string fit_failure_json(const MpcConfig& config, const std::string& input_path,
                             const PointCloud& cloud, const std::string& message,
                             const std::vector<double>& partial_trace);

// The evaluation summary alone, as {"eval": {...}}.
std::string eval_report_json(const EvalReport& report);

// The sampled prediction curve as CSV with header lambda,y1..yp.
std::string curve_csv(const Curve& curve);

// Shortest decimal spelling that parses back to the same double.
std::string format_value(double v);

}  // namespace mpc
