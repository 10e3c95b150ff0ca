#include "christo/commands.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <future>
#include <ostream>

#include "christo/errors.hpp"
#include "christo/model_io.hpp"

namespace christo {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

std::optional<int> parse_degree(const std::string& text) {
  if (text == "auto") return std::nullopt;
  int t = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), t);
  if (ec != std::errc{} || ptr != text.data() + text.size() || t < 1) {
    throw UsageError("--degree must be 'auto' or an integer >= 1, got '" + text + "'");
  }
  return t;
}

LabeledDataset cmd_synth(const SynthOptions& options) {
  if (options.per_class == 0) throw UsageError("synth needs N >= 1");
  const auto shapes = read_shapes(options.shapes);
  auto dataset = gen_shapes(shapes, options.per_class, options.seed);
  write_csv(dataset, options.out);
  return dataset;
}

ClassifierModel cmd_train(const TrainOptions& options, std::ostream& log) {
  const auto dataset = read_csv(options.data);
  FitOptions fit_options;
  fit_options.degree = options.degree;
  fit_options.policy = options.policy;
  fit_options.weighting = options.weighting;
  fit_options.metadata.seed = options.seed;
  auto model = fit(dataset, fit_options);
  model.set_reject_threshold(options.reject_below);
  save_model(model, options.out);

  const std::size_t full = polynomial_space_dim(model.dimension(), model.degree());
  log << "n = " << model.dimension() << "\nm = " << model.classes() << "\nt = " << model.degree()
      << "\ns(t) = " << full << '\n';
  const auto counts = dataset.class_counts();
  for (int j = 0; j < model.classes(); ++j) {
    const auto& ev = model.evaluators()[static_cast<std::size_t>(j)];
    log << "class." << (j + 1) << ".points = " << counts[static_cast<std::size_t>(j)] << '\n'
        << "class." << (j + 1) << ".rank = " << ev.rank() << '\n'
        << "class." << (j + 1) << ".condition = " << format_double(ev.condition_number()) << '\n';
    if (ev.rank() < full) {
      log << "class." << (j + 1) << ".warning = rank " << ev.rank() << " < s(t) " << full << '\n';
    }
  }
  return model;
}

double normalized_score(double raw, const ChristoffelEvaluator& evaluator) {
  return raw * static_cast<double>(evaluator.basis().size()) / evaluator.mass();
}

void cmd_predict(const PredictOptions& options, std::ostream& out) {
  const auto model = load_model(options.model);
  std::ifstream in(options.queries);
  if (!in) throw DataError("cannot open " + options.queries.string());
  const auto table = read_table(in, options.queries.string());
  const auto n = static_cast<std::size_t>(model.dimension());
  const bool has_label = table.header.size() == n + 1 && table.header.back() == "label";
  if (table.header.size() != n && !has_label) {
    throw DataError("queries have " + std::to_string(table.header.size()) +
                    " columns but the model expects n = " + std::to_string(n));
  }

  for (const auto& name : table.header) out << name << ',';
  out << "predicted";
  for (int j = 1; j <= model.classes(); ++j) out << ",score" << j;
  out << '\n';
  for (const auto& row : table.rows) {
    const std::span<const double> x(row.data(), n);
    const Eigen::VectorXd s = model.scores(x);
    const int label = model.classify(x);

    for (std::size_t c = 0; c < row.size(); ++c) {
      if (has_label && c == n) {
        out << static_cast<long long>(row[c]) << ',';
      } else {
        out << format_double(row[c]) << ',';
      }
    }
    out << label;
    for (int j = 0; j < model.classes(); ++j) {
      const double v = options.normalize
                           ? normalized_score(s[j], model.evaluators()[static_cast<std::size_t>(j)])
                           : s[j];
      out << ',' << format_double(v);
    }
    out << '\n';
  }
}

MetricsReport evaluate(const ClassifierModel& model, const LabeledDataset& test,
                       const std::vector<ShapeSpec>* shapes, double epsilon) {
  const auto start = Clock::now();
  if (test.size() == 0) throw DataError("test set is empty");
  test.validate();
  const int m = model.classes();
  if (test.classes > m) {
    throw DataError("test labels reach " + std::to_string(test.classes) + " but the model has " +
                    std::to_string(m) + " classes");
  }
  if (test.dimension() != model.dimension()) {
    throw DataError("test points have dimension " + std::to_string(test.dimension()) +
                    ", model expects " + std::to_string(model.dimension()));
  }

  MetricsReport report;
  const auto classes = static_cast<std::size_t>(m);
  report.class_counts.assign(classes, 0);
  report.class_accuracy.assign(classes, 0.0);
  report.confusion.assign(classes, std::vector<std::size_t>(classes, 0));
  report.rejected.assign(classes, 0);

  std::vector<int> predicted(test.size());
  for (std::size_t i = 0; i < test.size(); ++i) {
    predicted[i] = model.classify(test.point(i));
    const auto truth = static_cast<std::size_t>(test.labels[i] - 1);
    ++report.class_counts[truth];
    if (predicted[i] == kRejectLabel) {
      ++report.rejected[truth];
    } else {
      ++report.confusion[truth][static_cast<std::size_t>(predicted[i] - 1)];
    }
  }
  report.total = test.size();
  for (std::size_t j = 0; j < classes; ++j) {
    report.correct += report.confusion[j][j];
    report.class_accuracy[j] = report.class_counts[j] == 0
                                   ? 0.0
                                   : static_cast<double>(report.confusion[j][j]) /
                                         static_cast<double>(report.class_counts[j]);
  }
  report.accuracy = static_cast<double>(report.correct) / static_cast<double>(report.total);

  if (shapes != nullptr) {
    report.epsilon = epsilon;
    const auto interior = epsilon_interior_indices(test, *shapes, epsilon);
    std::size_t hits = 0;
    for (auto i : interior) hits += predicted[i] == test.labels[i] ? 1 : 0;
    report.interior_total = interior.size();
    report.interior_accuracy =
        interior.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(interior.size());
  }
  report.runtime_seconds = seconds_since(start);
  return report;
}

void write_metrics(const MetricsReport& report, std::ostream& out) {
  out << "accuracy = " << format_double(report.accuracy) << '\n';
  out << "total = " << report.total << '\n';
  out << "correct = " << report.correct << '\n';
  for (std::size_t j = 0; j < report.class_counts.size(); ++j) {
    out << "class." << (j + 1) << ".count = " << report.class_counts[j] << '\n';
    out << "class." << (j + 1) << ".accuracy = " << format_double(report.class_accuracy[j]) << '\n';
    out << "class." << (j + 1) << ".rejected = " << report.rejected[j] << '\n';
  }
  for (std::size_t j = 0; j < report.confusion.size(); ++j) {
    out << "confusion." << (j + 1) << " =";
    for (auto c : report.confusion[j]) out << ' ' << c;
    out << '\n';
  }
  if (report.epsilon) {
    out << "interior.epsilon = " << format_double(*report.epsilon) << '\n';
    out << "interior.count = " << report.interior_total << '\n';
    out << "interior.accuracy = " << format_double(report.interior_accuracy) << '\n';
  }
  out << "runtime_seconds = " << format_double(report.runtime_seconds) << '\n';
}

MetricsReport cmd_eval(const EvalOptions& options, std::ostream& out) {
  const auto model = load_model(options.model);
  const auto test = read_csv(options.data);
  std::optional<std::vector<ShapeSpec>> shapes;
  if (options.shapes) shapes = read_shapes(*options.shapes);
  auto report = evaluate(model, test, shapes ? &*shapes : nullptr, options.epsilon);
  write_metrics(report, out);
  return report;
}

LevelsetSummary levelset(const ClassifierModel& model, const LevelsetOptions& options,
                         std::ostream* grid_out) {
  const int n = model.dimension();
  const int m = model.classes();
  if (n > 3) throw UsageError("levelset grids support n <= 3, model has n = " + std::to_string(n));
  if (options.bounds.size() != static_cast<std::size_t>(2 * n)) {
    throw UsageError("--bounds needs 2n = " + std::to_string(2 * n) + " values");
  }
  if (options.grid_res < 1 || options.grid_res > 2000) {
    throw UsageError("--grid-res must lie in 1..2000");
  }
  for (int a = 0; a < n; ++a) {
    if (!(options.bounds[2 * a + 1] > options.bounds[2 * a])) {
      throw UsageError("bounds must satisfy lo < hi on every axis");
    }
  }

  LevelsetSummary summary;
  const auto classes = static_cast<std::size_t>(m);
  summary.gamma = options.gamma ? std::vector<double>(classes, *options.gamma) : model.class_gamma();
  summary.members.assign(classes, 0);
  summary.overlap.assign(classes, std::vector<std::size_t>(classes, 0));
  for (int a = 0; a < n; ++a) {
    summary.cell_size.push_back((options.bounds[2 * a + 1] - options.bounds[2 * a]) / options.grid_res);
  }

  if (grid_out != nullptr) {
    for (int a = 1; a <= n; ++a) *grid_out << 'x' << a << ',';
    for (int j = 1; j <= m; ++j) *grid_out << "lambda" << j << ',';
    for (int j = 1; j <= m; ++j) *grid_out << "in" << j << (j == m ? '\n' : ',');
  }

  std::size_t cells = 1;
  for (int a = 0; a < n; ++a) cells *= static_cast<std::size_t>(options.grid_res);
  summary.cells = cells;

  std::vector<double> x(static_cast<std::size_t>(n));
  std::vector<bool> in(classes);
  for (std::size_t cell = 0; cell < cells; ++cell) {
    // Last axis varies fastest.
    std::size_t rest = cell;
    for (int a = n - 1; a >= 0; --a) {
      const auto i = rest % static_cast<std::size_t>(options.grid_res);
      rest /= static_cast<std::size_t>(options.grid_res);
      x[a] = options.bounds[2 * a] + (static_cast<double>(i) + 0.5) * summary.cell_size[a];
    }
    const Eigen::VectorXd s = model.scores(x);
    int count = 0;
    for (std::size_t j = 0; j < classes; ++j) {
      in[j] = s[static_cast<Eigen::Index>(j)] >= summary.gamma[j];
      if (in[j]) {
        ++summary.members[j];
        ++count;
      }
    }
    for (std::size_t i = 0; i < classes; ++i) {
      for (std::size_t j = i + 1; j < classes; ++j) {
        if (in[i] && in[j]) {
          ++summary.overlap[i][j];
          ++summary.overlap[j][i];
        }
      }
    }
    if (count >= 2) summary.overlap_cells.push_back(x);

    if (grid_out != nullptr) {
      for (double c : x) *grid_out << format_double(c) << ',';
      for (std::size_t j = 0; j < classes; ++j) {
        const double v = s[static_cast<Eigen::Index>(j)];
        *grid_out << format_double(options.normalize ? normalized_score(v, model.evaluators()[j]) : v)
                  << ',';
      }
      for (std::size_t j = 0; j < classes; ++j) *grid_out << (in[j] ? 1 : 0) << (j + 1 == classes ? '\n' : ',');
    }
  }
  return summary;
}

void write_levelset_summary(const LevelsetSummary& summary, std::ostream& out) {
  out << "cells = " << summary.cells << '\n';
  for (std::size_t j = 0; j < summary.members.size(); ++j) {
    out << "class." << (j + 1) << ".gamma = " << format_double(summary.gamma[j]) << '\n';
    out << "class." << (j + 1) << ".cells = " << summary.members[j] << '\n';
  }
  for (std::size_t i = 0; i < summary.overlap.size(); ++i) {
    for (std::size_t j = i + 1; j < summary.overlap.size(); ++j) {
      out << "overlap." << (i + 1) << '.' << (j + 1) << " = " << summary.overlap[i][j] << '\n';
    }
  }
}

namespace {

SweepRow sweep_cell(const std::vector<ShapeSpec>& shapes, const SweepOptions& options,
                    std::size_t per_class, int degree, std::uint64_t seed) {
  SweepRow row;
  row.per_class = per_class;
  row.degree = degree;
  row.seed = seed;
  const auto start = Clock::now();
  try {
    const auto train = gen_shapes(shapes, per_class, seed);
    const auto test = gen_shapes(shapes, options.test_per_class, mix_seed(seed, 0x7e57));
    FitOptions fit_options;
    fit_options.degree = degree;
    fit_options.policy = options.policy;
    fit_options.metadata.seed = seed;
    const auto model = fit(train, fit_options);
    const auto report = evaluate(model, test, &shapes, options.epsilon);
    row.accuracy = report.accuracy;
    row.interior_accuracy = report.interior_accuracy;
  } catch (const std::exception& e) {
    row.status = e.what();
    row.accuracy = std::nan("");
    row.interior_accuracy = std::nan("");
  }
  row.runtime_seconds = seconds_since(start);
  return row;
}

}  // namespace

std::vector<SweepRow> run_sweep(const std::vector<ShapeSpec>& shapes, const SweepOptions& options) {
  if (options.sizes.empty()) throw UsageError("sweep needs at least one N");
  if (options.degrees.empty()) throw UsageError("sweep needs at least one degree");
  if (options.seeds.empty()) throw UsageError("sweep needs at least one seed");
  for (int t : options.degrees) {
    if (t < 1) throw UsageError("sweep degrees must be >= 1");
  }
  for (auto n : options.sizes) {
    if (n == 0) throw UsageError("sweep sizes must be >= 1");
  }

  struct Cell {
    std::size_t per_class;
    int degree;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (auto n : options.sizes) {
    for (int t : options.degrees) {
      for (auto s : options.seeds) cells.push_back({n, t, s});
    }
  }

  std::vector<SweepRow> rows(cells.size());
  const std::size_t jobs = std::max(1u, options.jobs);
  for (std::size_t begin = 0; begin < cells.size(); begin += jobs) {
    const std::size_t end = std::min(cells.size(), begin + jobs);
    std::vector<std::future<SweepRow>> pending;
    for (std::size_t i = begin; i < end; ++i) {
      const auto c = cells[i];
      pending.push_back(std::async(jobs == 1 ? std::launch::deferred : std::launch::async,
                                   [&shapes, &options, c] {
                                     return sweep_cell(shapes, options, c.per_class, c.degree, c.seed);
                                   }));
    }
    for (std::size_t i = begin; i < end; ++i) rows[i] = pending[i - begin].get();
  }
  return rows;
}

void write_sweep(const std::vector<SweepRow>& rows, std::ostream& out) {
  out << "N,t,seed,accuracy,interior_accuracy,runtime_seconds,status\n";
  for (const auto& r : rows) {
    std::string status = r.status;
    std::replace(status.begin(), status.end(), ',', ';');
    std::replace(status.begin(), status.end(), '\n', ' ');
    out << r.per_class << ',' << r.degree << ',' << r.seed << ',' << format_double(r.accuracy) << ','
        << format_double(r.interior_accuracy) << ',' << format_double(r.runtime_seconds) << ','
        << status << '\n';
  }
}

}  // namespace christo
