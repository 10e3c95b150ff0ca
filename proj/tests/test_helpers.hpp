#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "christo/datasets.hpp"
#include "christo/log.hpp"
#include "christo/moments.hpp"

namespace christo::testing {

/// Collects warnings instead of printing them while in scope.
struct WarningCapture {
  std::vector<std::string> messages;
  WarningCapture() {
    set_warning_sink([this](const std::string& m) { messages.push_back(m); });
  }
  ~WarningCapture() { set_warning_sink({}); }
  WarningCapture(const WarningCapture&) = delete;
  WarningCapture& operator=(const WarningCapture&) = delete;
};

inline LabeledDataset make_dataset(const std::vector<std::vector<double>>& points,
                                   const std::vector<int>& labels, int classes) {
  LabeledDataset ds;
  ds.points.resize(static_cast<Eigen::Index>(points.size()),
                   static_cast<Eigen::Index>(points.empty() ? 0 : points.front().size()));
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t c = 0; c < points[i].size(); ++c) {
      ds.points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = points[i][c];
    }
  }
  ds.labels = labels;
  ds.classes = classes;
  return ds;
}

inline PointMatrix column(const std::vector<double>& values) {
  PointMatrix p(static_cast<Eigen::Index>(values.size()), 1);
  for (std::size_t i = 0; i < values.size(); ++i) p(static_cast<Eigen::Index>(i), 0) = values[i];
  return p;
}

/// Uniform points in [-1, 1]^n.
inline PointMatrix random_points(Rng& rng, std::size_t count, int n) {
  PointMatrix p(static_cast<Eigen::Index>(count), n);
  for (Eigen::Index r = 0; r < p.rows(); ++r) {
    for (Eigen::Index c = 0; c < p.cols(); ++c) p(r, c) = rng.uniform(-1.0, 1.0);
  }
  return p;
}

}  // namespace christo::testing
