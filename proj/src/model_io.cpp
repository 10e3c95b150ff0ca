#include "christo/model_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "christo/errors.hpp"

namespace christo {

namespace {

std::string hex(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", value);
  return buf;
}

template <typename Vector>
void write_row(std::ostream& out, const char* key, const Vector& values) {
  out << key;
  for (Eigen::Index i = 0; i < values.size(); ++i) out << ' ' << hex(values[i]);
  out << '\n';
}

class Reader {
public:
  Reader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

  // Next line split into words; the first word must equal `key`.
  std::vector<std::string> expect(const std::string& key) {
    std::string line;
    if (!std::getline(in_, line)) fail("unexpected end of file, expected '" + key + "'");
    ++line_no_;
    std::istringstream ss(line);
    std::vector<std::string> words;
    for (std::string w; ss >> w;) words.push_back(w);
    if (words.empty() || words.front() != key) fail("expected '" + key + "'");
    words.erase(words.begin());
    return words;
  }

  std::string single(const std::string& key) {
    auto words = expect(key);
    if (words.size() != 1) fail("'" + key + "' takes one value");
    return words.front();
  }

  double number(const std::string& text) {
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || *end != '\0') fail("bad number '" + text + "'");
    return v;
  }

  long long integer(const std::string& text) {
    char* end = nullptr;
    const long long v = std::strtoll(text.c_str(), &end, 10);
    if (end == text.c_str() || *end != '\0') fail("bad integer '" + text + "'");
    return v;
  }

  Eigen::VectorXd row(const std::string& key, Eigen::Index expected) {
    const auto words = expect(key);
    if (static_cast<Eigen::Index>(words.size()) != expected) {
      fail("'" + key + "' needs " + std::to_string(expected) + " values");
    }
    Eigen::VectorXd v(expected);
    for (Eigen::Index i = 0; i < expected; ++i) v[i] = number(words[static_cast<std::size_t>(i)]);
    return v;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw DataError(source_ + " line " + std::to_string(line_no_) + ": " + what);
  }

private:
  std::istream& in_;
  std::string source_;
  int line_no_ = 0;
};

}  // namespace

void save_model(const ClassifierModel& model, std::ostream& out) {
  const int n = model.dimension();
  out << "christo-model " << kModelFormatVersion << '\n';
  out << "basis plain " << n << ' ' << model.degree() << '\n';
  out << "classes " << model.classes() << '\n';
  out << "weighting " << (model.weighting() == ClassWeighting::prior ? "prior" : "uniform") << '\n';
  out << "policy " << model.policy().to_string() << '\n';
  out << "rng " << model.metadata().rng << '\n';
  out << "seed " << model.metadata().seed << '\n';
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016" PRIx64, model.metadata().dataset_hash);
  out << "dataset-hash " << hash << '\n';
  out << "reject " << (model.reject_threshold() ? hex(*model.reject_threshold()) : "none") << '\n';
  write_row(out, "center", model.transform().center);
  write_row(out, "scale", model.transform().scale);
  for (int j = 0; j < model.classes(); ++j) {
    const auto& ev = model.evaluators()[static_cast<std::size_t>(j)];
    out << "class " << (j + 1) << " rank " << ev.rank() << " support " << ev.support_size() << '\n';
    out << "mass " << hex(ev.mass()) << '\n';
    out << "threshold " << hex(ev.threshold()) << '\n';
    out << "gamma " << hex(model.class_gamma()[static_cast<std::size_t>(j)]) << '\n';
    write_row(out, "eigenvalues", ev.eigenvalues());
    for (Eigen::Index k = 0; k < ev.eigenvectors().cols(); ++k) {
      write_row(out, "eigenvector", Eigen::VectorXd(ev.eigenvectors().col(k)));
    }
  }
  out << "end\n";
}

void save_model(const ClassifierModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  save_model(model, out);
  if (!out) throw DataError("write failed for " + path.string());
}

ClassifierModel load_model(std::istream& in, const std::string& source) {
  Reader r(in, source);
  const auto version = r.integer(r.single("christo-model"));
  if (version != kModelFormatVersion) r.fail("unsupported model format version " + std::to_string(version));

  const auto basis_words = r.expect("basis");
  if (basis_words.size() != 3 || basis_words[0] != "plain") r.fail("expected 'basis plain <n> <t>'");
  const auto n = static_cast<int>(r.integer(basis_words[1]));
  const auto t = static_cast<int>(r.integer(basis_words[2]));
  if (n < 1 || t < 1) r.fail("basis needs n >= 1 and t >= 1");
  const auto m = static_cast<int>(r.integer(r.single("classes")));
  if (m < 1) r.fail("model needs at least one class");

  const auto weighting_text = r.single("weighting");
  ClassWeighting weighting = ClassWeighting::uniform;
  if (weighting_text == "prior") {
    weighting = ClassWeighting::prior;
  } else if (weighting_text != "uniform") {
    r.fail("unknown weighting '" + weighting_text + "'");
  }

  ThresholdPolicy policy;
  try {
    policy = ThresholdPolicy::parse(r.single("policy"));
  } catch (const UsageError& e) {
    r.fail(e.what());
  }

  ModelMetadata metadata;
  metadata.rng = r.single("rng");
  metadata.seed = std::strtoull(r.single("seed").c_str(), nullptr, 10);
  metadata.dataset_hash = std::strtoull(r.single("dataset-hash").c_str(), nullptr, 16);

  const auto reject_text = r.single("reject");
  std::optional<double> reject;
  if (reject_text != "none") reject = r.number(reject_text);

  AffineTransform transform;
  transform.center = r.row("center", n);
  transform.scale = r.row("scale", n);

  const MonomialBasis basis = enumerate_basis(n, t);
  const auto size = static_cast<Eigen::Index>(basis.size());
  std::vector<ChristoffelEvaluator> evaluators;
  std::vector<double> gamma;
  for (int j = 1; j <= m; ++j) {
    const auto head = r.expect("class");
    if (head.size() != 5 || r.integer(head[0]) != j || head[1] != "rank" || head[3] != "support") {
      r.fail("expected 'class " + std::to_string(j) + " rank <r> support <N>'");
    }
    const auto rank = static_cast<Eigen::Index>(r.integer(head[2]));
    const auto support = static_cast<std::size_t>(r.integer(head[4]));
    if (rank < 1 || rank > size) r.fail("rank out of range");
    const double mass = r.number(r.single("mass"));
    const double threshold = r.number(r.single("threshold"));
    gamma.push_back(r.number(r.single("gamma")));
    Eigen::VectorXd values = r.row("eigenvalues", rank);
    Eigen::MatrixXd vectors(size, rank);
    for (Eigen::Index k = 0; k < rank; ++k) vectors.col(k) = r.row("eigenvector", size);
    try {
      evaluators.emplace_back(basis, std::move(values), std::move(vectors), threshold, mass, policy,
                              support);
    } catch (const NumericalError& e) {
      r.fail(e.what());
    }
  }
  r.expect("end");

  ClassifierModel model(t, std::move(evaluators), std::move(transform), weighting, std::move(gamma),
                        std::move(metadata));
  model.set_reject_threshold(reject);
  return model;
}

ClassifierModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model " + path.string());
  return load_model(in, path.string());
}

}  // namespace christo
