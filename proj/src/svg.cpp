#include "mpc/svg.hpp"

#include <cmath>
#include <cstdio>

#include "mpc/errors.hpp"

namespace mpc {

namespace {

constexpr double kPanel = 800.0;

std::string pixels(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

struct AxisRange {
  double lo = 0.0, hi = 1.0;

  double to_pixel(double v) const { return (v - lo) / (hi - lo) * kPanel; }
};

AxisRange column_range(const PointCloud& cloud, const Curve& curve, int column) {
  double lo = cloud.data.col(column).minCoeff();
  double hi = cloud.data.col(column).maxCoeff();
  if (curve.points.rows() > 0) {
    lo = std::min(lo, curve.points.col(column).minCoeff());
    hi = std::max(hi, curve.points.col(column).maxCoeff());
  }
  const double margin = (hi > lo) ? 0.05 * (hi - lo) : 0.5;
  return {lo - margin, hi + margin};
}

}  // namespace

std::vector<std::pair<int, int>> default_axis_pairs(int p) {
  if (p < 2) throw InvalidSpec("figures need at least two data columns");
  if (p == 2) return {{1, 2}};
  if (p == 3) return {{1, 2}, {1, 3}, {2, 3}};
  std::vector<std::pair<int, int>> pairs;
  for (int j = 1; j < p; ++j) pairs.emplace_back(j, j + 1);
  return pairs;
}

std::string render_panels(const PointCloud& cloud, const Curve& curve,
                          const std::vector<std::pair<int, int>>& axis_pairs) {
  if (cloud.n() < 1) throw InsufficientData("nothing to plot: the cloud is empty");
  if (axis_pairs.empty()) throw InvalidSpec("no axis pairs to draw");
  if (curve.points.rows() > 0 && curve.points.cols() != cloud.p())
    throw DimensionMismatch("curve has " + std::to_string(curve.points.cols()) +
                            " columns, cloud has " + std::to_string(cloud.p()));
  for (const auto& [a, b] : axis_pairs) {
    if (a < 1 || b < 1 || a > cloud.p() || b > cloud.p())
      throw InvalidSpec("axis out of range: columns run from 1 to " +
                        std::to_string(cloud.p()));
    if (a == b) throw InvalidSpec("axis pair must name two different columns");
  }

  const double width = kPanel * static_cast<double>(axis_pairs.size());
  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + pixels(width) +
         "\" height=\"" + pixels(kPanel) + "\" viewBox=\"0 0 " + pixels(width) + " " +
         pixels(kPanel) + "\">\n";
  out += "<rect width=\"" + pixels(width) + "\" height=\"" + pixels(kPanel) +
         "\" fill=\"#ffffff\"/>\n";

  for (std::size_t panel = 0; panel < axis_pairs.size(); ++panel) {
    const int a = axis_pairs[panel].first - 1;
    const int b = axis_pairs[panel].second - 1;
    const double offset = kPanel * static_cast<double>(panel);
    const AxisRange xr = column_range(cloud, curve, a);
    const AxisRange yr = column_range(cloud, curve, b);

    out += "<rect x=\"" + pixels(offset) + "\" y=\"0.00\" width=\"" + pixels(kPanel) +
           "\" height=\"" + pixels(kPanel) +
           "\" fill=\"none\" stroke=\"#333333\"/>\n";
    out += "<text x=\"" + pixels(offset + 12.0) +
           "\" y=\"24.00\" font-family=\"sans-serif\" font-size=\"16\" "
           "fill=\"#333333\">y" +
           std::to_string(a + 1) + " / y" + std::to_string(b + 1) + "</text>\n";

    for (Eigen::Index i = 0; i < cloud.n(); ++i) {
      const double cx = offset + xr.to_pixel(cloud.data(i, a));
      const double cy = kPanel - yr.to_pixel(cloud.data(i, b));
      out += "<circle cx=\"" + pixels(cx) + "\" cy=\"" + pixels(cy) +
             "\" r=\"4\" fill=\"#1f77b4\"/>\n";
    }

    if (curve.points.rows() > 1) {
      out += "<polyline fill=\"none\" stroke=\"#d62728\" stroke-width=\"2\" points=\"";
      for (Eigen::Index k = 0; k < curve.points.rows(); ++k) {
        if (k > 0) out += ' ';
        out += pixels(offset + xr.to_pixel(curve.points(k, a))) + ',' +
               pixels(kPanel - yr.to_pixel(curve.points(k, b)));
      }
      out += "\"/>\n";
    }
  }

  out += "</svg>\n";
  return out;
}

}  // namespace mpc
