#include "mpc/datasets.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "mpc/errors.hpp"
#include "mpc/rng.hpp"

namespace mpc {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && (s[a] == ' ' || s[a] == '\t')) ++a;
  while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t' || s[b - 1] == '\r')) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return out;
}

bool parse_double(const std::string& field, double& out) {
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto res = std::from_chars(begin, end, out);
  return res.ec == std::errc() && res.ptr == end && field.size() > 0;
}

double parse_cell(const std::string& field, int row, int col) {
  double v;
  if (!parse_double(field, v))
    throw ParseError("cannot parse '" + field + "' as a number at row " +
                     std::to_string(row) + ", column " + std::to_string(col),
                     row, col);
  if (!std::isfinite(v))
    throw ParseError("non-finite value at row " + std::to_string(row) + ", column " +
                     std::to_string(col), row, col);
  return v;
}

std::string format_cell(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

PointCloud generate(const GeneratorSpec& spec) {
  if (spec.n < 4)
    throw InvalidSpec("generator needs n >= 4, got " + std::to_string(spec.n));
  if (!(spec.sigma >= 0.0)) throw InvalidSpec("generator sigma must be >= 0");

  const int n = spec.n;
  Rng rng(spec.seed);
  PointCloud cloud;
  cloud.data.resize(n, 3);
  Eigen::VectorXd t(n);
  for (int i = 0; i < n; ++i)
    t[i] = static_cast<double>(i) / static_cast<double>(n - 1);

  switch (spec.kind) {
    case DatasetKind::Seven:
      for (int i = 0; i < n; ++i) {
        const double e1 = rng.normal(0.0, spec.sigma);
        const double e2 = rng.normal(0.0, spec.sigma);
        const double e3 = rng.normal(0.0, spec.sigma);
        const double u2 = rng.uniform(0.0, 1.0);
        const double u3 = rng.uniform(-2.0, 0.7);
        const bool x = rng.bernoulli(0.5);
        cloud.data(i, 0) = t[i] + e1;
        cloud.data(i, 1) = x ? u2 : 1.0 + e2;
        cloud.data(i, 2) = x ? 1.0 + e3 : u3;
      }
      break;
    case DatasetKind::Spiral:
      for (int i = 0; i < n; ++i) {
        const double e2 = rng.normal(0.0, spec.sigma);
        const double e3 = rng.normal(0.0, spec.sigma);
        cloud.data(i, 0) = t[i];
        cloud.data(i, 1) = 2.0 * t[i] * std::cos(6.0 * t[i]) + e2;
        cloud.data(i, 2) = 2.0 * t[i] * std::sin(6.0 * t[i]) + e3;
      }
      break;
    case DatasetKind::Bridge:
      for (int i = 0; i < n; ++i) {
        const double e2 = rng.normal(0.0, spec.sigma);
        const double e3 = rng.normal(0.0, spec.sigma);
        cloud.data(i, 0) = t[i];
        cloud.data(i, 1) = std::sin(2.0 * t[i]) + std::cos(2.0 * t[i] / 3.0) + e2;
        cloud.data(i, 2) = -t[i] * std::sin(2.0 * t[i]) + e3;
      }
      break;
  }
  cloud.ground_truth_t = t;
  return cloud;
}

PointCloud load_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");

  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  if (lines.empty()) throw InsufficientData("'" + path + "' contains no data");

  std::vector<std::string> first = split_fields(lines[0]);
  const std::size_t cols = first.size();

  // a header is any first row with a field that does not parse as a number
  bool has_header = false;
  for (const auto& f : first) {
    double v;
    if (!parse_double(f, v)) {
      has_header = true;
      break;
    }
  }

  int t_col = -1, label_col = -1;
  std::vector<int> data_cols;
  if (has_header) {
    for (std::size_t c = 0; c < cols; ++c) {
      if (first[c] == "t" && t_col < 0)
        t_col = static_cast<int>(c);
      else if (first[c] == "label" && label_col < 0)
        label_col = static_cast<int>(c);
      else
        data_cols.push_back(static_cast<int>(c));
    }
  } else {
    for (std::size_t c = 0; c < cols; ++c) data_cols.push_back(static_cast<int>(c));
  }
  if (data_cols.empty())
    throw InsufficientData("'" + path + "' has no data columns");

  const std::size_t first_data = has_header ? 1 : 0;
  const std::size_t rows = lines.size() - first_data;
  if (rows == 0) throw InsufficientData("'" + path + "' contains no data rows");

  PointCloud cloud;
  cloud.data.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(data_cols.size()));
  Eigen::VectorXd tvec(static_cast<Eigen::Index>(rows));
  std::vector<int> labels(rows);

  for (std::size_t r = 0; r < rows; ++r) {
    const int file_row = static_cast<int>(first_data + r) + 1;
    const std::vector<std::string> fields = split_fields(lines[first_data + r]);
    if (fields.size() != cols)
      throw RaggedRows("row " + std::to_string(file_row) + " has " +
                       std::to_string(fields.size()) + " fields, expected " +
                       std::to_string(cols));
    for (std::size_t k = 0; k < data_cols.size(); ++k) {
      const int c = data_cols[k];
      cloud.data(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) =
          parse_cell(fields[static_cast<std::size_t>(c)], file_row, c + 1);
    }
    if (t_col >= 0)
      tvec[static_cast<Eigen::Index>(r)] =
          parse_cell(fields[static_cast<std::size_t>(t_col)], file_row, t_col + 1);
    if (label_col >= 0) {
      const double v = parse_cell(fields[static_cast<std::size_t>(label_col)], file_row,
                                  label_col + 1);
      if (v != std::floor(v))
        throw ParseError("label at row " + std::to_string(file_row) + ", column " +
                         std::to_string(label_col + 1) + " is not an integer",
                         file_row, label_col + 1);
      labels[r] = static_cast<int>(v);
    }
  }

  if (t_col >= 0) cloud.ground_truth_t = std::move(tvec);
  if (label_col >= 0) cloud.labels = std::move(labels);
  return cloud;
}

void save_csv(const PointCloud& cloud, const std::string& path) {
  std::ostringstream out;
  if (cloud.ground_truth_t) out << "t,";
  for (Eigen::Index j = 0; j < cloud.p(); ++j) {
    if (j > 0) out << ',';
    out << 'y' << (j + 1);
  }
  if (cloud.labels) out << ",label";
  out << '\n';

  for (Eigen::Index i = 0; i < cloud.n(); ++i) {
    if (cloud.ground_truth_t) out << format_cell((*cloud.ground_truth_t)[i]) << ',';
    for (Eigen::Index j = 0; j < cloud.p(); ++j) {
      if (j > 0) out << ',';
      out << format_cell(cloud.data(i, j));
    }
    if (cloud.labels) out << ',' << (*cloud.labels)[static_cast<std::size_t>(i)];
    out << '\n';
  }
  write_text_atomic(path, out.str());
}

void write_text_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp + "' for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("failed writing '" + tmp + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move '" + tmp + "' to '" + path + "': " + ec.message());
}

}  // namespace mpc
