// christo: Christoffel-function classification from the command line.
//
// Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical failure.

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "christo/commands.hpp"
#include "christo/errors.hpp"
#include "christo/model_io.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

template <typename T>
std::vector<T> parse_list(const std::string& text, const char* flag) {
  std::vector<T> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    T value{};
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    if (ec != std::errc{} || ptr != item.data() + item.size()) {
      throw christo::UsageError(std::string(flag) + ": cannot parse '" + item + "'");
    }
    values.push_back(value);
  }
  return values;
}

std::optional<double> parse_gamma(const std::string& text) {
  if (text == "auto") return std::nullopt;
  if (text == "inf" || text == "+inf") return INFINITY;
  const auto v = parse_list<double>(text, "--gamma");
  if (v.size() != 1) throw christo::UsageError("--gamma takes 'auto' or one number");
  return v.front();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Christoffel-function classifier: synth, train, predict, eval, levelset, sweep"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  std::string out;

  // synth
  auto* synth = app.add_subcommand("synth", "Sample labeled points uniformly from a shape file");
  christo::SynthOptions synth_opts;
  synth->add_option("shapes", synth_opts.shapes, "Shape file")->required();
  synth->add_option("-N,--per-class", synth_opts.per_class, "Points per class")->required();
  synth->add_option("--seed", seed, "64-bit PRNG seed");
  synth->add_option("--out", out, "Output CSV")->required();

  // train
  auto* train = app.add_subcommand("train", "Fit per-class Christoffel functions");
  christo::TrainOptions train_opts;
  std::string degree_text = "auto";
  std::string policy_text = "rel:1e-10";
  bool prior_weights = false;
  std::optional<double> reject;
  train->add_option("data", train_opts.data, "Training CSV")->required();
  train->add_option("--degree", degree_text, "Degree t or 'auto'");
  train->add_option("--threshold-policy", policy_text, "rel:<float> or tikhonov:<float>");
  train->add_flag("--class-prior-weights", prior_weights, "Class mass N_j/N instead of 1");
  train->add_option("--reject", reject, "Reject when every score is below this value");
  train->add_option("--seed", seed, "Seed recorded in the model metadata");
  train->add_option("--out", out, "Output model file")->required();

  // predict
  auto* predict = app.add_subcommand("predict", "Label query points and report scores");
  christo::PredictOptions predict_opts;
  predict->add_option("model", predict_opts.model, "Model file")->required();
  predict->add_option("queries", predict_opts.queries, "Query CSV")->required();
  predict->add_flag("--normalize", predict_opts.normalize, "Report Lambda * s(t) / mass");
  predict->add_option("--out", out, "Output CSV (default stdout)");

  // eval
  auto* eval = app.add_subcommand("eval", "Accuracy, confusion and epsilon-interior accuracy");
  christo::EvalOptions eval_opts;
  std::string eval_shapes;
  eval->add_option("model", eval_opts.model, "Model file")->required();
  eval->add_option("data", eval_opts.data, "Labeled test CSV")->required();
  eval->add_option("--shapes", eval_shapes, "Shape file for the epsilon-interior figure");
  eval->add_option("--epsilon", eval_opts.epsilon, "Boundary distance for the interior figure");
  eval->add_option("--out", out, "Output report (default stdout)");

  // levelset
  auto* level = app.add_subcommand("levelset", "Superlevel sets and pairwise overlap on a grid");
  christo::LevelsetOptions level_opts;
  std::string model_path;
  std::string bounds_text;
  std::string gamma_text = "auto";
  level->add_option("model", model_path, "Model file")->required();
  level->add_option("--bounds", bounds_text, "lo1,hi1,...,lon,hin")->required();
  level->add_option("--grid-res", level_opts.grid_res, "Cells per axis (<= 2000)");
  level->add_option("--gamma", gamma_text, "Superlevel threshold or 'auto'");
  level->add_flag("--normalize", level_opts.normalize, "Report Lambda * s(t) / mass");
  level->add_option("--out", out, "Grid CSV (summary goes to stdout)");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Accuracy over a (N, t, seed) factorial design");
  christo::SweepOptions sweep_opts;
  std::string sweep_shapes, sizes_text, degrees_text, seeds_text = "0";
  std::string sweep_policy = "rel:1e-10";
  sweep->add_option("shapes", sweep_shapes, "Shape file")->required();
  sweep->add_option("--sizes", sizes_text, "Comma-separated N per class")->required();
  sweep->add_option("--degrees", degrees_text, "Comma-separated degrees")->required();
  sweep->add_option("--seeds", seeds_text, "Comma-separated seeds");
  sweep->add_option("--test-per-class", sweep_opts.test_per_class, "Test points per class");
  sweep->add_option("--epsilon", sweep_opts.epsilon, "Boundary distance for interior accuracy");
  sweep->add_option("--threshold-policy", sweep_policy, "rel:<float> or tikhonov:<float>");
  sweep->add_option("--jobs", sweep_opts.jobs, "Cells evaluated concurrently");
  sweep->add_option("--out", out, "Output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    auto with_output = [&out](auto&& body) {
      if (out.empty()) {
        body(std::cout);
      } else {
        std::ofstream file(out, std::ios::binary);
        if (!file) throw christo::DataError("cannot write " + out);
        body(file);
      }
    };

    if (*synth) {
      synth_opts.seed = seed;
      synth_opts.out = out;
      const auto ds = christo::cmd_synth(synth_opts);
      std::cerr << "wrote " << ds.size() << " points in " << ds.classes << " classes to " << out << '\n';
    } else if (*train) {
      train_opts.degree = christo::parse_degree(degree_text);
      train_opts.policy = christo::ThresholdPolicy::parse(policy_text);
      train_opts.weighting =
          prior_weights ? christo::ClassWeighting::prior : christo::ClassWeighting::uniform;
      train_opts.reject_below = reject;
      train_opts.seed = seed;
      train_opts.out = out;
      christo::cmd_train(train_opts, std::cout);
    } else if (*predict) {
      with_output([&](std::ostream& os) { christo::cmd_predict(predict_opts, os); });
    } else if (*eval) {
      if (!eval_shapes.empty()) eval_opts.shapes = eval_shapes;
      with_output([&](std::ostream& os) { christo::cmd_eval(eval_opts, os); });
    } else if (*level) {
      level_opts.bounds = parse_list<double>(bounds_text, "--bounds");
      level_opts.gamma = parse_gamma(gamma_text);
      const auto model = christo::load_model(model_path);
      std::optional<std::ofstream> grid;
      if (!out.empty()) {
        grid.emplace(out, std::ios::binary);
        if (!*grid) throw christo::DataError("cannot write " + out);
      }
      const auto summary = christo::levelset(model, level_opts, grid ? &*grid : nullptr);
      christo::write_levelset_summary(summary, std::cout);
    } else if (*sweep) {
      sweep_opts.sizes = parse_list<std::size_t>(sizes_text, "--sizes");
      sweep_opts.degrees = parse_list<int>(degrees_text, "--degrees");
      sweep_opts.seeds = parse_list<std::uint64_t>(seeds_text, "--seeds");
      sweep_opts.policy = christo::ThresholdPolicy::parse(sweep_policy);
      const auto shapes = christo::read_shapes(sweep_shapes);
      const auto rows = christo::run_sweep(shapes, sweep_opts);
      with_output([&](std::ostream& os) { christo::write_sweep(rows, os); });
    }
  } catch (const christo::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const christo::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const christo::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return 0;
}
