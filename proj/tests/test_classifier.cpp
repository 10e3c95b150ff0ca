#include <algorithm>
#include <cmath>
#include <vector>

#include "christo/classifier.hpp"
#include "christo/errors.hpp"
#include "doctest.h"
#include "test_helpers.hpp"

using namespace christo;
using christo::testing::make_dataset;
using christo::testing::random_points;
using christo::testing::WarningCapture;

namespace {

LabeledDataset two_intervals() {
  return make_dataset({{-1}, {0}, {1}, {2}, {3}, {4}}, {1, 1, 1, 2, 2, 2}, 2);
}

ClassifierModel fit_degree(const LabeledDataset& ds, int t,
                           ClassWeighting weighting = ClassWeighting::uniform) {
  FitOptions options;
  options.degree = t;
  options.weighting = weighting;
  return fit(ds, options);
}

LabeledDataset random_labeled(Rng& rng, std::size_t count, int n, int m) {
  LabeledDataset ds;
  ds.points = random_points(rng, count, n);
  ds.classes = m;
  for (std::size_t i = 0; i < count; ++i) ds.labels.push_back(1 + static_cast<int>(i % m));
  return ds;
}

}  // namespace

TEST_CASE("Lagrange interpolation polynomials") {
  const auto two = make_theta(2);
  for (double y : {-1.0, 0.0, 1.5, 3.0}) {
    CHECK(two(1, y) == doctest::Approx(2.0 - y));
    CHECK(two(2, y) == doctest::Approx(y - 1.0));
  }
  CHECK(two(1, 1) == 1.0);
  CHECK(two(1, 2) == 0.0);
  const auto three = make_theta(3);
  CHECK(three(2, 2) == 1.0);
  CHECK(three(2, 0.5) == doctest::Approx(-(0.5 - 1.0) * (0.5 - 3.0)));

  for (int m = 2; m <= 12; ++m) {
    const auto theta = make_theta(m);
    for (int i = 1; i <= m; ++i) {
      for (int j = 1; j <= m; ++j) {
        CHECK(theta(j, i) == (i == j ? 1.0 : 0.0));
        // the power form loses digits to cancellation as m grows
        const double slack = 1e-10 * std::pow(10.0, std::max(0, m - 6));
        CHECK(std::abs(theta.power_form(j, i) - (i == j ? 1.0 : 0.0)) <= slack);
      }
    }
    for (int k = 0; k < 10; ++k) {
      const double y = 0.3 + 1.3 * k;
      double sum = 0.0;
      for (int j = 1; j <= m; ++j) sum += theta(j, y);
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
  CHECK_THROWS_AS(make_theta(1), UsageError);
  CHECK_THROWS_AS(make_theta(13), UsageError);
}

TEST_CASE("fit and score the two interval example") {
  const auto model = fit_degree(two_intervals(), 1);
  CHECK(model.classes() == 2);
  CHECK(model.degree() == 1);
  for (double x : {-2.0, 0.0, 0.5, 1.7, 3.0, 6.0}) {
    const auto q = model.inverse_scores(std::span<const double>(&x, 1));
    CHECK(q[0] == doctest::Approx(1.0 + 1.5 * x * x).epsilon(1e-10));
    CHECK(q[1] == doctest::Approx(14.5 - 9.0 * x + 1.5 * x * x).epsilon(1e-10));
  }
  double x = 0.0;
  const auto s = model.scores(std::span<const double>(&x, 1));
  CHECK(s[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(s[1] == doctest::Approx(1.0 / 14.5).epsilon(1e-10));
  CHECK(model.classify(std::span<const double>(&x, 1)) == 1);
  x = 3.0;
  CHECK(model.classify(std::span<const double>(&x, 1)) == 2);

  const std::vector<double> wrong{1.0, 2.0};
  CHECK_THROWS(model.classify(wrong));
}

TEST_CASE("ties go to the smallest class and rejection is opt-in") {
  auto model = fit_degree(make_dataset({{-2}, {-1}, {1}, {2}}, {1, 1, 2, 2}, 2), 1);
  double x = 0.0;
  const auto s = model.scores(std::span<const double>(&x, 1));
  CHECK(s[0] == s[1]);
  CHECK(model.classify(std::span<const double>(&x, 1)) == 1);

  x = 10.0;
  CHECK(model.classify(std::span<const double>(&x, 1)) == 2);
  model.set_reject_threshold(0.05);
  CHECK(model.classify(std::span<const double>(&x, 1)) == kRejectLabel);
  x = 1.5;
  CHECK(model.classify(std::span<const double>(&x, 1)) == 2);
}

TEST_CASE("joint Christoffel function") {
  const auto model = fit_degree(two_intervals(), 1);
  for (double x : {-1.0, 0.25, 2.0, 5.0}) {
    const std::span<const double> xs(&x, 1);
    const auto q = model.inverse_scores(xs);
    const auto s = model.scores(xs);
    CHECK(model.joint_cf(xs, 1.0) == s[0]);
    CHECK(model.joint_cf(xs, 2.0) == s[1]);
    CHECK(1.0 / model.joint_cf(xs, 1.5) == doctest::Approx(0.25 * (q[0] + q[1])).epsilon(1e-12));
    CHECK(1.0 / model.joint_cf(xs, 0.0) == doctest::Approx(4.0 * q[0] + q[1]).epsilon(1e-12));
  }

  // A rank-deficient class scores zero off its hull without producing NaN.
  WarningCapture capture;
  const auto degenerate =
      fit_degree(make_dataset({{0, 0}, {0, 0}, {1, 1}, {2, 0}, {1, -1}}, {1, 1, 2, 2, 2}, 2), 1);
  CHECK_FALSE(capture.messages.empty());
  const std::vector<double> x{1.0, 0.5};
  CHECK(degenerate.scores(x)[0] == 0.0);
  CHECK(degenerate.joint_cf(x, 1.0) == 0.0);
  CHECK(degenerate.joint_cf(x, 2.0) == degenerate.scores(x)[1]);
  CHECK(degenerate.joint_cf(x, 1.5) == 0.0);
}

TEST_CASE("variety Christoffel function") {
  Rng rng(7);
  LabeledDataset single;
  single.points = random_points(rng, 30, 2);
  single.labels.assign(30, 1);
  single.classes = 1;
  const auto joint = variety_cf(single, 2);
  const auto plain = build_evaluator(
      empirical_moment_matrix(uniform_measure(single.points), enumerate_basis(2, 2)));
  CHECK(joint.basis().size() == plain.basis().size());
  const std::vector<double> x{0.3, -0.1};
  CHECK(joint.value(joint.monomials(x, 1.0)) == doctest::Approx(eval_cf(plain, x)).epsilon(1e-9));

  const auto ds = two_intervals();
  const auto ev = variety_cf(ds, 2);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    CHECK(ev.value(ev.monomials(ds.point(i), ds.labels[i])) > 0.0);
  }
}

TEST_CASE("tensor joint moment matrix reproduces the class scores") {
  WarningCapture capture;
  Rng rng(41);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + trial % 2;
    const int m = 2 + trial % 2;
    const int t = 1 + trial % 3;
    const auto ds = random_labeled(rng, 12 + static_cast<std::size_t>(trial % 19), n, m);
    const auto tensor = tensor_cf(ds, t);
    const auto model = fit_degree(ds, t, ClassWeighting::prior);
    const auto probes = random_points(rng, 5, n);
    for (Eigen::Index r = 0; r < probes.rows(); ++r) {
      const std::span<const double> x(probes.data() + r * n, static_cast<std::size_t>(n));
      const auto s = model.scores(x);
      for (int j = 1; j <= m; ++j) {
        const double direct = tensor.value(tensor.monomials(x, j));
        CHECK(direct == doctest::Approx(s[j - 1]).epsilon(1e-6));
      }
      const double y = 1.37;
      CHECK(tensor.value(tensor.monomials(x, y)) == doctest::Approx(model.joint_cf(x, y)).epsilon(1e-6));
    }
  }
}

TEST_CASE("sandwich ordering of inverse scores") {
  Rng rng(43);
  for (int trial = 0; trial < 20; ++trial) {
    const auto ds = random_labeled(rng, 4 + static_cast<std::size_t>(trial % 7), 1, 2);
    std::vector<JointQuery> grid;
    for (int k = 0; k < 50; ++k) grid.push_back({{-1.5 + 3.0 * k / 49.0}, 1 + k % 2});
    const auto report = sandwich_check(ds, 2 + trial % 2, grid);
    CHECK(report.checked == 50);
    CHECK(report.violations.empty());
  }
  const auto pair = make_dataset({{0.0}, {1.0}}, {1, 2}, 2);
  std::vector<JointQuery> grid{{{0.0}, 1}, {{1.0}, 2}, {{0.5}, 1}, {{0.0}, 2}};
  CHECK(sandwich_check(pair, 2, grid).violations.empty());
  CHECK_THROWS_AS(sandwich_check(pair, 2, {{{0.0}, 3}}), DataError);
}

TEST_CASE("classification is invariant under common scaling and affine maps") {
  Rng rng(47);
  LabeledDataset ds;
  ds.classes = 2;
  ds.points.resize(200, 2);
  for (Eigen::Index i = 0; i < 200; ++i) {
    const double sign = i < 100 ? -1.0 : 1.0;
    ds.points(i, 0) = sign * 1.2 + rng.uniform(-1.0, 1.0);
    ds.points(i, 1) = rng.uniform(-1.0, 1.0);
    ds.labels.push_back(i < 100 ? 1 : 2);
  }
  const auto model = fit_degree(ds, 3);
  const auto weighted = fit_degree(ds, 3, ClassWeighting::prior);

  LabeledDataset moved = ds;
  for (Eigen::Index i = 0; i < 200; ++i) {
    moved.points(i, 0) = 3.0 * ds.points(i, 0) - 7.0;
    moved.points(i, 1) = -0.5 * ds.points(i, 1) + 2.0;
  }
  const auto moved_model = fit_degree(moved, 3);
  const PointMatrix probes = random_points(rng, 200, 2) * 2.5;
  for (Eigen::Index r = 0; r < probes.rows(); ++r) {
    const std::vector<double> x{probes(r, 0), probes(r, 1)};
    const std::vector<double> y{3.0 * x[0] - 7.0, -0.5 * x[1] + 2.0};
    CHECK(model.classify(x) == weighted.classify(x));
    CHECK(model.classify(x) == moved_model.classify(y));
  }
}

TEST_CASE("default degree and fit errors") {
  CHECK(default_degree(2, 100) == 8);
  CHECK(default_degree(2, 1) == 1);
  CHECK(default_degree(1, 10) == 4);
  Rng rng(53);
  const auto ds = random_labeled(rng, 200, 2, 2);
  CHECK(fit(ds).degree() == 8);
  CHECK_THROWS_AS(fit(make_dataset({{0.0}, {1.0}}, {1, 1}, 2)), DataError);
  FitOptions zero;
  zero.degree = 0;
  CHECK_THROWS_AS(fit(ds, zero), UsageError);
  CHECK(quantile({3.0, 1.0, 2.0}, 0.5) == 2.0);
  CHECK(quantile({0.0, 10.0}, 0.05) == doctest::Approx(0.5));
}
