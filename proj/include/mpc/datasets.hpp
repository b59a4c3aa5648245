// Synthetic benchmark generators and CSV ingestion/persistence.
#pragma once

#include <cstdint>
#include <string>

#include "mpc/point_cloud.hpp"

namespace mpc {

enum class DatasetKind { Seven, Spiral, Bridge };

struct GeneratorSpec {
  DatasetKind kind = DatasetKind::Spiral;
  int n = 120;
  double sigma = 0.1;  // noise standard deviation
  std::uint64_t seed = 0;
};

// Draws a point cloud from the named generative model. The underlying curve
// parameter t is n equispaced values on [0, 1] inclusive and is returned in
// ground_truth_t. Draw order per point is fixed (noise terms, then uniforms,
// then the branch flag), so a seed fully determines the cloud.
PointCloud generate(const GeneratorSpec& spec);

// Comma-separated, optional header. Header columns named "t" and "label"
// populate ground_truth_t and labels; the remaining columns form data.
// save followed by load round-trips bit-exactly (17 significant digits).
PointCloud load_csv(const std::string& path);
void save_csv(const PointCloud& cloud, const std::string& path);

// Writes content to path via a temporary file and rename, so readers never
// observe a partially written file.
void write_text_atomic(const std::string& path, const std::string& content);

}  // namespace mpc
