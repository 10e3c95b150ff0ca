#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "christo/classifier.hpp"
#include "christo/datasets.hpp"

namespace christo {

// Implementations behind the `christo` subcommands. Each takes parsed options and writes
// its artifacts; the executable only maps flags and exceptions to exit codes.

/// Parses `--degree`: "auto" or an integer >= 1.
std::optional<int> parse_degree(const std::string& text);

struct SynthOptions {
  std::filesystem::path shapes;
  std::size_t per_class = 500;
  std::uint64_t seed = 0;
  std::filesystem::path out;
};
LabeledDataset cmd_synth(const SynthOptions& options);

struct TrainOptions {
  std::filesystem::path data;
  std::optional<int> degree;
  ThresholdPolicy policy = ThresholdPolicy::relative();
  ClassWeighting weighting = ClassWeighting::uniform;
  std::uint64_t seed = 0;
  std::optional<double> reject_below;
  std::filesystem::path out;
};
/// Fits, saves and prints per-class rank / conditioning diagnostics to `log`.
ClassifierModel cmd_train(const TrainOptions& options, std::ostream& log);

/// Lambda * s(t) / mass: of order one inside the support for any degree.
double normalized_score(double raw, const ChristoffelEvaluator& evaluator);

struct PredictOptions {
  std::filesystem::path model;
  std::filesystem::path queries;
  bool normalize = false;
};
/// Echoes the query columns and appends `predicted,score1..scorem`.
void cmd_predict(const PredictOptions& options, std::ostream& out);

struct MetricsReport {
  std::size_t total = 0;
  std::size_t correct = 0;
  double accuracy = 0.0;
  std::vector<std::size_t> class_counts;
  std::vector<double> class_accuracy;
  /// m x m, rows are true labels, columns predictions.
  std::vector<std::vector<std::size_t>> confusion;
  /// Per true class, predictions rejected by the reject threshold (not in `confusion`).
  std::vector<std::size_t> rejected;
  std::optional<double> epsilon;
  std::size_t interior_total = 0;
  double interior_accuracy = 0.0;
  double runtime_seconds = 0.0;
};

/// Metrics of `model` on `test`; with shapes, a second accuracy over the epsilon-interior.
MetricsReport evaluate(const ClassifierModel& model, const LabeledDataset& test,
                       const std::vector<ShapeSpec>* shapes = nullptr, double epsilon = 0.0);
/// `key = value` lines.
void write_metrics(const MetricsReport& report, std::ostream& out);

struct EvalOptions {
  std::filesystem::path model;
  std::filesystem::path data;
  std::optional<std::filesystem::path> shapes;
  double epsilon = 0.1;
};
MetricsReport cmd_eval(const EvalOptions& options, std::ostream& out);

struct LevelsetOptions {
  /// lo_1, hi_1, ..., lo_n, hi_n
  std::vector<double> bounds;
  int grid_res = 100;
  /// Unset uses each class's stored default gamma_j.
  std::optional<double> gamma;
  bool normalize = false;
};

struct LevelsetSummary {
  std::size_t cells = 0;
  std::vector<double> gamma;
  /// |G_j| in cells.
  std::vector<std::size_t> members;
  /// overlap[i][j] = |G_i cap G_j| in cells (upper triangle filled, symmetric).
  std::vector<std::vector<std::size_t>> overlap;
  /// Centers of cells lying in two or more superlevel sets.
  std::vector<std::vector<double>> overlap_cells;
  /// Cell edge lengths.
  std::vector<double> cell_size;
};

/// Scans the grid of cell centers; writes one CSV row per cell to `grid_out` when given.
LevelsetSummary levelset(const ClassifierModel& model, const LevelsetOptions& options,
                         std::ostream* grid_out);
void write_levelset_summary(const LevelsetSummary& summary, std::ostream& out);

struct SweepOptions {
  std::vector<std::size_t> sizes;
  std::vector<int> degrees;
  std::vector<std::uint64_t> seeds;
  std::size_t test_per_class = 1000;
  double epsilon = 0.1;
  ThresholdPolicy policy = ThresholdPolicy::relative();
  unsigned jobs = 1;
};

struct SweepRow {
  std::size_t per_class = 0;
  int degree = 0;
  std::uint64_t seed = 0;
  double accuracy = 0.0;
  double interior_accuracy = 0.0;
  double runtime_seconds = 0.0;
  /// "ok" or the error message of a failed cell.
  std::string status = "ok";
};

/// Full factorial (N, t, seed) run. Rows come back in (N, t, seed) order whatever `jobs` is;
/// a failing cell is recorded and the run continues.
std::vector<SweepRow> run_sweep(const std::vector<ShapeSpec>& shapes, const SweepOptions& options);
void write_sweep(const std::vector<SweepRow>& rows, std::ostream& out);

}  // namespace christo
