#include "christo/datasets.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "christo/errors.hpp"

namespace christo {

std::uint64_t Rng::below(std::uint64_t bound) {
  // Lemire's nearly-divisionless method.
  std::uint64_t x = engine_();
  __uint128_t product = static_cast<__uint128_t>(x) * bound;
  auto low = static_cast<std::uint64_t>(product);
  if (low < bound) {
    const std::uint64_t floor = (0 - bound) % bound;
    while (low < floor) {
      x = engine_();
      product = static_cast<__uint128_t>(x) * bound;
      low = static_cast<std::uint64_t>(product);
    }
  }
  return static_cast<std::uint64_t>(product >> 64);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// ---------------------------------------------------------------------------
// Shapes

namespace {

double distance_to_center(const std::vector<double>& center, std::span<const double> x) {
  double sum = 0.0;
  for (std::size_t i = 0; i < center.size(); ++i) {
    const double d = x[i] - center[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

void check_dim(const ShapeSpec& shape, std::span<const double> x) {
  if (static_cast<int>(x.size()) != shape.dimension()) {
    throw DataError("point has dimension " + std::to_string(x.size()) + ", shape has " +
                    std::to_string(shape.dimension()));
  }
}

}  // namespace

int ShapeSpec::dimension() const {
  return static_cast<int>(kind == ShapeKind::box ? lo.size() : center.size());
}

void ShapeSpec::validate() const {
  if (label < 1) throw DataError("shape label must be >= 1");
  switch (kind) {
    case ShapeKind::disk:
      if (center.empty()) throw DataError("disk needs a center");
      if (!(radius > 0.0)) throw DataError("disk radius must be > 0");
      break;
    case ShapeKind::annulus:
      if (center.empty()) throw DataError("annulus needs a center");
      if (!(inner > 0.0) || !(outer > inner)) {
        throw DataError("annulus needs 0 < inner < outer");
      }
      break;
    case ShapeKind::box:
      if (lo.empty() || lo.size() != hi.size()) throw DataError("box needs lo and hi of equal length");
      for (std::size_t i = 0; i < lo.size(); ++i) {
        if (!(hi[i] > lo[i])) throw DataError("box corners must satisfy lo < hi in every coordinate");
      }
      break;
  }
}

bool ShapeSpec::contains(std::span<const double> x) const { return interior_distance(x) > 0.0; }

double ShapeSpec::interior_distance(std::span<const double> x) const {
  check_dim(*this, x);
  switch (kind) {
    case ShapeKind::disk:
      return radius - distance_to_center(center, x);
    case ShapeKind::annulus: {
      const double r = distance_to_center(center, x);
      return std::min(outer - r, r - inner);
    }
    case ShapeKind::box: {
      double inside = std::numeric_limits<double>::infinity();
      double outside2 = 0.0;
      for (std::size_t i = 0; i < lo.size(); ++i) {
        inside = std::min({inside, x[i] - lo[i], hi[i] - x[i]});
        const double gap = std::max({lo[i] - x[i], x[i] - hi[i], 0.0});
        outside2 += gap * gap;
      }
      return inside > 0.0 ? inside : (outside2 > 0.0 ? -std::sqrt(outside2) : inside);
    }
  }
  return 0.0;
}

std::pair<std::vector<double>, std::vector<double>> ShapeSpec::bounding_box() const {
  if (kind == ShapeKind::box) return {lo, hi};
  const double r = kind == ShapeKind::disk ? radius : outer;
  std::vector<double> a(center.size()), b(center.size());
  for (std::size_t i = 0; i < center.size(); ++i) {
    a[i] = center[i] - r;
    b[i] = center[i] + r;
  }
  return {a, b};
}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

bool parse_number(std::string_view text, double& out) {
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc{} && ptr == end && std::isfinite(out);
}

std::vector<double> parse_vector(const std::string& text, const std::string& where) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double v = 0.0;
    if (!parse_number(trim(item), v)) throw DataError(where + ": bad number '" + item + "'");
    values.push_back(v);
  }
  if (values.empty()) throw DataError(where + ": empty coordinate list");
  return values;
}

double parse_scalar(const std::string& text, const std::string& where) {
  double v = 0.0;
  if (!parse_number(text, v)) throw DataError(where + ": bad number '" + text + "'");
  return v;
}

}  // namespace

std::vector<ShapeSpec> parse_shapes(std::istream& in, const std::string& source) {
  std::vector<ShapeSpec> shapes;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = source + " line " + std::to_string(line_no);
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;

    std::stringstream ss(line);
    std::string word;
    ss >> word;
    if (word != "shape") throw DataError(where + ": expected 'shape', got '" + word + "'");

    ShapeSpec shape;
    bool has_kind = false;
    bool has_label = false;
    while (ss >> word) {
      const auto eq = word.find('=');
      if (eq == std::string::npos) throw DataError(where + ": expected key=value, got '" + word + "'");
      const std::string key = word.substr(0, eq);
      const std::string value = word.substr(eq + 1);
      if (key == "kind") {
        if (value == "disk") {
          shape.kind = ShapeKind::disk;
        } else if (value == "annulus") {
          shape.kind = ShapeKind::annulus;
        } else if (value == "box") {
          shape.kind = ShapeKind::box;
        } else {
          throw DataError(where + ": unknown shape kind '" + value + "'");
        }
        has_kind = true;
      } else if (key == "label") {
        int label = 0;
        const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), label);
        if (ec != std::errc{} || ptr != value.data() + value.size()) {
          throw DataError(where + ": bad label '" + value + "'");
        }
        shape.label = label;
        has_label = true;
      } else if (key == "center") {
        shape.center = parse_vector(value, where);
      } else if (key == "radius") {
        shape.radius = parse_scalar(value, where);
      } else if (key == "inner") {
        shape.inner = parse_scalar(value, where);
      } else if (key == "outer") {
        shape.outer = parse_scalar(value, where);
      } else if (key == "lo") {
        shape.lo = parse_vector(value, where);
      } else if (key == "hi") {
        shape.hi = parse_vector(value, where);
      } else {
        throw DataError(where + ": unknown key '" + key + "'");
      }
    }
    if (!has_kind) throw DataError(where + ": missing kind=");
    if (!has_label) throw DataError(where + ": missing label=");
    try {
      shape.validate();
    } catch (const DataError& e) {
      throw DataError(where + ": " + e.what());
    }
    if (!shapes.empty() && shapes.front().dimension() != shape.dimension()) {
      throw DataError(where + ": shape dimension differs from earlier shapes");
    }
    shapes.push_back(std::move(shape));
  }
  if (shapes.empty()) throw DataError(source + ": no shapes defined");
  return shapes;
}

std::vector<ShapeSpec> read_shapes(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open shape file " + path.string());
  return parse_shapes(in, path.string());
}

LabeledDataset gen_shapes(const std::vector<ShapeSpec>& specs, std::size_t per_class,
                          std::uint64_t seed) {
  if (specs.empty()) throw UsageError("gen_shapes needs at least one shape");
  if (per_class == 0) throw UsageError("gen_shapes needs at least one point per class");
  int m = 0;
  const int n = specs.front().dimension();
  for (const auto& s : specs) {
    s.validate();
    if (s.dimension() != n) throw DataError("all shapes must share one dimension");
    m = std::max(m, s.label);
  }

  LabeledDataset out;
  out.classes = m;
  out.points.resize(static_cast<Eigen::Index>(per_class) * m, n);
  out.labels.reserve(per_class * static_cast<std::size_t>(m));

  Eigen::Index row = 0;
  for (int label = 1; label <= m; ++label) {
    std::vector<const ShapeSpec*> members;
    std::vector<double> lo(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
    std::vector<double> hi(static_cast<std::size_t>(n), -std::numeric_limits<double>::infinity());
    for (const auto& s : specs) {
      if (s.label != label) continue;
      members.push_back(&s);
      const auto [a, b] = s.bounding_box();
      for (int i = 0; i < n; ++i) {
        lo[i] = std::min(lo[i], a[i]);
        hi[i] = std::max(hi[i], b[i]);
      }
    }
    if (members.empty()) throw DataError("class " + std::to_string(label) + " has no shape");

    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(label)));
    std::vector<double> x(static_cast<std::size_t>(n));
    for (std::size_t drawn = 0; drawn < per_class;) {
      for (int i = 0; i < n; ++i) x[i] = rng.uniform(lo[i], hi[i]);
      const bool inside = std::any_of(members.begin(), members.end(),
                                      [&](const ShapeSpec* s) { return s->contains(x); });
      if (!inside) continue;
      for (int i = 0; i < n; ++i) out.points(row, i) = x[i];
      out.labels.push_back(label);
      ++row;
      ++drawn;
    }
  }
  return out;
}

double class_interior_distance(const std::vector<ShapeSpec>& specs, int label,
                               std::span<const double> x) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& s : specs) {
    if (s.label == label) best = std::max(best, s.interior_distance(x));
  }
  return best;
}

std::vector<std::size_t> epsilon_interior_indices(const LabeledDataset& dataset,
                                                  const std::vector<ShapeSpec>& specs,
                                                  double epsilon) {
  if (!(epsilon >= 0.0)) throw UsageError("epsilon must be >= 0");
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (class_interior_distance(specs, dataset.labels[i], dataset.point(i)) > epsilon) {
      kept.push_back(i);
    }
  }
  return kept;
}

LabeledDataset epsilon_interior(const LabeledDataset& dataset, const std::vector<ShapeSpec>& specs,
                                double epsilon) {
  const auto kept = epsilon_interior_indices(dataset, specs, epsilon);
  return subset(dataset, kept);
}

LabeledDataset epsilon_interior(const PointMatrix& points, const std::vector<ShapeSpec>& specs,
                                double epsilon) {
  if (!(epsilon >= 0.0)) throw UsageError("epsilon must be >= 0");
  int m = 0;
  for (const auto& s : specs) m = std::max(m, s.label);
  std::vector<std::pair<Eigen::Index, int>> kept;
  for (Eigen::Index r = 0; r < points.rows(); ++r) {
    const std::span<const double> x(points.data() + r * points.cols(),
                                    static_cast<std::size_t>(points.cols()));
    for (int label = 1; label <= m; ++label) {
      if (class_interior_distance(specs, label, x) > epsilon) {
        kept.emplace_back(r, label);
        break;
      }
    }
  }
  LabeledDataset out;
  out.classes = m;
  out.points.resize(static_cast<Eigen::Index>(kept.size()), points.cols());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    out.points.row(static_cast<Eigen::Index>(i)) = points.row(kept[i].first);
    out.labels.push_back(kept[i].second);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Scaling

AffineTransform AffineTransform::identity(int n) {
  return {Eigen::VectorXd::Zero(n), Eigen::VectorXd::Ones(n)};
}

std::vector<double> AffineTransform::apply(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dimension()) {
    throw DataError("point has dimension " + std::to_string(x.size()) + ", transform expects " +
                    std::to_string(dimension()));
  }
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    y[i] = (x[i] - center[k]) * scale[k];
  }
  return y;
}

std::vector<double> AffineTransform::invert(std::span<const double> y) const {
  if (static_cast<int>(y.size()) != dimension()) throw DataError("dimension mismatch in inverse transform");
  std::vector<double> x(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    x[i] = y[i] / scale[k] + center[k];
  }
  return x;
}

PointMatrix AffineTransform::apply(const PointMatrix& points) const {
  if (points.cols() != center.size()) throw DataError("dimension mismatch in transform");
  PointMatrix out(points.rows(), points.cols());
  for (Eigen::Index r = 0; r < points.rows(); ++r) {
    for (Eigen::Index c = 0; c < points.cols(); ++c) out(r, c) = (points(r, c) - center[c]) * scale[c];
  }
  return out;
}

void AffineTransform::validate() const {
  if (center.size() != scale.size() || center.size() == 0) {
    throw DataError("affine transform has inconsistent dimensions");
  }
  for (Eigen::Index i = 0; i < scale.size(); ++i) {
    if (!std::isfinite(scale[i]) || scale[i] == 0.0 || !std::isfinite(center[i])) {
      throw DataError("affine transform is not invertible");
    }
  }
}

AffineTransform fit_unit_box(const PointMatrix& points) {
  if (points.rows() == 0) throw DataError("cannot fit a transform to an empty point set");
  AffineTransform tr;
  tr.center.resize(points.cols());
  tr.scale.resize(points.cols());
  for (Eigen::Index c = 0; c < points.cols(); ++c) {
    const double lo = points.col(c).minCoeff();
    const double hi = points.col(c).maxCoeff();
    if (hi > lo) {
      tr.center[c] = 0.5 * (lo + hi);
      tr.scale[c] = 2.0 / (hi - lo);
    } else {
      tr.center[c] = lo;
      tr.scale[c] = 1.0;
    }
  }
  return tr;
}

std::pair<LabeledDataset, AffineTransform> scale_to_unit_box(const LabeledDataset& dataset) {
  AffineTransform tr = fit_unit_box(dataset.points);
  LabeledDataset scaled{tr.apply(dataset.points), dataset.labels, dataset.classes};
  // Rounding can push an extreme coordinate a hair past the box.
  scaled.points = scaled.points.cwiseMax(-1.0).cwiseMin(1.0);
  return {std::move(scaled), std::move(tr)};
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

CsvTable read_table(std::istream& in, const std::string& source) {
  CsvTable table;
  std::string line;
  int line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto fields = split_fields(line);
    if (!have_header) {
      table.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw DataError(source + ": ragged row at line " + std::to_string(line_no) + ": expected " +
                      std::to_string(table.header.size()) + " fields, got " +
                      std::to_string(fields.size()));
    }
    std::vector<double> row(fields.size());
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (!parse_number(fields[i], row[i])) {
        throw DataError(source + ": non-numeric cell '" + fields[i] + "' at line " +
                        std::to_string(line_no));
      }
    }
    table.rows.push_back(std::move(row));
  }
  if (!have_header) throw DataError(source + ": empty file");
  return table;
}

LabeledDataset read_csv(std::istream& in, const std::string& source) {
  // Parsed line by line so label errors can name their line.
  std::string line;
  int line_no = 0;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto fields = split_fields(line);
    if (header.empty()) {
      if (fields.size() < 2 || fields.back() != "label") {
        throw DataError(source + ": header must be x1,...,xn,label (line " +
                        std::to_string(line_no) + ")");
      }
      header = std::move(fields);
      continue;
    }
    if (fields.size() != header.size()) {
      throw DataError(source + ": ragged row at line " + std::to_string(line_no) + ": expected " +
                      std::to_string(header.size()) + " fields, got " +
                      std::to_string(fields.size()));
    }
    std::vector<double> row(fields.size() - 1);
    for (std::size_t i = 0; i + 1 < fields.size(); ++i) {
      if (!parse_number(fields[i], row[i])) {
        throw DataError(source + ": non-numeric cell '" + fields[i] + "' at line " +
                        std::to_string(line_no));
      }
    }
    const std::string& cell = fields.back();
    int label = 0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), label);
    if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
      throw DataError(source + ": non-integer label '" + cell + "' at line " +
                      std::to_string(line_no));
    }
    if (label < 1) throw DataError("label < 1 at line " + std::to_string(line_no));
    rows.push_back(std::move(row));
    labels.push_back(label);
  }
  if (header.empty()) throw DataError(source + ": empty file");
  if (rows.empty()) throw DataError(source + ": no data rows");

  LabeledDataset ds;
  ds.points.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(header.size() - 1));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      ds.points(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  ds.classes = *std::max_element(labels.begin(), labels.end());
  ds.labels = std::move(labels);
  return ds;
}

LabeledDataset read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return read_csv(in, path.string());
}

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_csv(const LabeledDataset& dataset, std::ostream& out) {
  for (int c = 0; c < dataset.dimension(); ++c) out << 'x' << (c + 1) << ',';
  out << "label\n";
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    for (double v : dataset.point(i)) out << format_double(v) << ',';
    out << dataset.labels[i] << '\n';
  }
}

void write_csv(const LabeledDataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  write_csv(dataset, out);
  if (!out) throw DataError("write failed for " + path.string());
}

// ---------------------------------------------------------------------------
// Splits

LabeledDataset subset(const LabeledDataset& dataset, std::span<const std::size_t> indices) {
  LabeledDataset out;
  out.classes = dataset.classes;
  out.points.resize(static_cast<Eigen::Index>(indices.size()), dataset.points.cols());
  out.labels.reserve(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    out.points.row(static_cast<Eigen::Index>(i)) =
        dataset.points.row(static_cast<Eigen::Index>(indices[i]));
    out.labels.push_back(dataset.labels[indices[i]]);
  }
  return out;
}

std::pair<LabeledDataset, LabeledDataset> train_test_split(const LabeledDataset& dataset,
                                                           double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw UsageError("split fraction must lie in (0, 1)");
  dataset.validate();

  std::vector<bool> in_train(dataset.size(), false);
  for (int label = 1; label <= dataset.classes; ++label) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      if (dataset.labels[i] == label) members.push_back(i);
    }
    if (members.empty()) continue;
    if (members.size() < 2) {
      throw DataError("class " + std::to_string(label) + " has fewer than 2 points; cannot stratify");
    }
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(label)));
    for (std::size_t i = members.size() - 1; i > 0; --i) {
      std::swap(members[i], members[rng.below(i + 1)]);
    }
    auto keep = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(members.size())));
    keep = std::clamp<std::size_t>(keep, 1, members.size() - 1);
    for (std::size_t k = 0; k < keep; ++k) in_train[members[k]] = true;
  }

  std::vector<std::size_t> train, test;
  for (std::size_t i = 0; i < dataset.size(); ++i) (in_train[i] ? train : test).push_back(i);
  return {subset(dataset, train), subset(dataset, test)};
}

std::uint64_t dataset_hash(const LabeledDataset& dataset) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](const void* data, std::size_t bytes) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < bytes; ++i) {
      h ^= p[i];
      h *= 0x100000001b3ULL;
    }
  };
  const auto n = static_cast<std::uint64_t>(dataset.dimension());
  feed(&n, sizeof n);
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    for (double v : dataset.point(i)) feed(&v, sizeof v);
    const std::int64_t label = dataset.labels[i];
    feed(&label, sizeof label);
  }
  return h;
}

}  // namespace christo
