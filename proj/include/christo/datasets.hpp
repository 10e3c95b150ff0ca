#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "christo/moments.hpp"

namespace christo {

/// Seedable generator used for every random draw in the project. std::mt19937_64 is fully
/// specified by the standard, and doubles are derived from its top 53 bits, so a seed
/// reproduces the same stream on every platform.
class Rng {
public:
  static constexpr const char* kName = "mt19937_64/top53-v1";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, bound), bound > 0, without modulo bias.
  std::uint64_t below(std::uint64_t bound);

private:
  std::mt19937_64 engine_;
};

/// Derives an independent stream seed, e.g. one per class.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

enum class ShapeKind { disk, annulus, box };

/// A class support region. Disks and annuli are balls/shells in R^n.
struct ShapeSpec {
  ShapeKind kind = ShapeKind::disk;
  int label = 1;
  std::vector<double> center;  // disk, annulus
  double radius = 0.0;         // disk
  double inner = 0.0;          // annulus
  double outer = 0.0;          // annulus
  std::vector<double> lo;      // box
  std::vector<double> hi;      // box

  int dimension() const;
  /// Throws DataError for zero-area or malformed shapes.
  void validate() const;
  bool contains(std::span<const double> x) const;
  /// Distance to the boundary, positive inside and negative outside.
  double interior_distance(std::span<const double> x) const;
  std::pair<std::vector<double>, std::vector<double>> bounding_box() const;
};

/// Parses the shape file format, one shape per line:
///
///   # comment
///   shape label=1 kind=disk center=-2,0 radius=1
///   shape label=2 kind=annulus center=0,0 inner=0.5 outer=1
///   shape label=3 kind=box lo=-1,-1 hi=1,1
///
/// Several shapes may share a label; the class support is their union.
std::vector<ShapeSpec> parse_shapes(std::istream& in, const std::string& source = "<shapes>");
std::vector<ShapeSpec> read_shapes(const std::filesystem::path& path);

/// `per_class` points uniform on each class support by rejection sampling from its bounding
/// box. Labels run 1..max label; classes are emitted in label order.
LabeledDataset gen_shapes(const std::vector<ShapeSpec>& specs, std::size_t per_class,
                          std::uint64_t seed);

/// Signed distance of x to the boundary of the union of `label`'s shapes (max over shapes;
/// exact when a class's shapes do not overlap).
double class_interior_distance(const std::vector<ShapeSpec>& specs, int label,
                               std::span<const double> x);

/// Indices of points lying in their own class support at distance > epsilon from its boundary.
std::vector<std::size_t> epsilon_interior_indices(const LabeledDataset& dataset,
                                                  const std::vector<ShapeSpec>& specs,
                                                  double epsilon);
LabeledDataset epsilon_interior(const LabeledDataset& dataset, const std::vector<ShapeSpec>& specs,
                                double epsilon);
/// Grid variant: keeps unlabeled points that lie in some class's epsilon-interior and labels
/// them with the first such class.
LabeledDataset epsilon_interior(const PointMatrix& points, const std::vector<ShapeSpec>& specs,
                                double epsilon);

/// Per-coordinate map x -> (x - center) * scale.
struct AffineTransform {
  Eigen::VectorXd center;
  Eigen::VectorXd scale;

  static AffineTransform identity(int n);

  int dimension() const { return static_cast<int>(center.size()); }
  std::vector<double> apply(std::span<const double> x) const;
  std::vector<double> invert(std::span<const double> y) const;
  PointMatrix apply(const PointMatrix& points) const;
  /// Throws DataError unless every scale is finite and nonzero.
  void validate() const;

  bool operator==(const AffineTransform& other) const {
    return center == other.center && scale == other.scale;
  }
};

/// Maps the bounding box of `points` onto [-1, 1]^n. A constant coordinate keeps scale 1
/// and is only re-centered.
AffineTransform fit_unit_box(const PointMatrix& points);
std::pair<LabeledDataset, AffineTransform> scale_to_unit_box(const LabeledDataset& dataset);

/// Header row names the columns; numeric rows follow.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

/// Reads a comma-separated numeric table. Errors carry the 1-based line number.
CsvTable read_table(std::istream& in, const std::string& source = "<csv>");

/// Dataset CSV: header `x1,...,xn,label`, label column last, integer labels >= 1; m is the
/// largest label.
LabeledDataset read_csv(std::istream& in, const std::string& source = "<csv>");
LabeledDataset read_csv(const std::filesystem::path& path);
void write_csv(const LabeledDataset& dataset, std::ostream& out);
void write_csv(const LabeledDataset& dataset, const std::filesystem::path& path);

/// 17 significant digits, enough to round-trip any double.
std::string format_double(double value);

/// Stratified split: each class keeps round(fraction * N_j) points (at least one on each
/// side) in the training part. Both parts preserve the input order.
std::pair<LabeledDataset, LabeledDataset> train_test_split(const LabeledDataset& dataset,
                                                           double fraction, std::uint64_t seed);

/// Rows of `dataset` at `indices`, in the given order; keeps the class count.
LabeledDataset subset(const LabeledDataset& dataset, std::span<const std::size_t> indices);

/// FNV-1a 64 over the coordinates and labels, for provenance records.
std::uint64_t dataset_hash(const LabeledDataset& dataset);

}  // namespace christo
