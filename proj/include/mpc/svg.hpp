// Static scatter-plus-curve figures as standalone SVG markup.
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mpc/fit.hpp"
#include "mpc/point_cloud.hpp"

namespace mpc {

// The panels drawn when no axis pair is requested: (1,2) for two columns,
// all three pairs for three, consecutive pairs otherwise.
std::vector<std::pair<int, int>> default_axis_pairs(int p);

// One 800x800 panel per axis pair, side by side: the cloud as dots with the
// sampled curve overlaid as a polyline. Pairs are 1-based column indices;
// the two must differ. Axis limits cover both cloud and curve with a 5%
// margin. Output bytes are a pure function of the inputs.
std::string render_panels(const PointCloud& cloud, const Curve& curve,
                          const std::vector<std::pair<int, int>>& axis_pairs);

}  // namespace mpc
