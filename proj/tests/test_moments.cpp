#include <cmath>

#include <Eigen/Eigenvalues>

#include "christo/errors.hpp"
#include "christo/moments.hpp"
#include "doctest.h"
#include "test_helpers.hpp"

using namespace christo;
using christo::testing::column;
using christo::testing::make_dataset;
using christo::testing::random_points;

TEST_CASE("class_split builds normalized per-class measures") {
  const auto two = make_dataset({{-1, 1}, {1, 2}}, {1, 2}, 2);
  const auto parts = class_split(two);
  REQUIRE(parts.size() == 2);
  CHECK(parts[0].weights.size() == 1);
  CHECK(parts[0].weights[0] == 1.0);
  CHECK(parts[1].points(0, 1) == 2.0);

  const auto three = make_dataset({{0.0}, {1.0}, {2.0}}, {1, 1, 2}, 2);
  const auto split = class_split(three);
  CHECK(split[0].mass == 1.0);
  CHECK(split[1].mass == 1.0);
  CHECK(split[0].weights[0] == 0.5);
  CHECK(split[0].weights[1] == 0.5);
  CHECK(split[1].weights[0] == 1.0);

  const auto prior = class_split(three, ClassWeighting::prior);
  CHECK(prior[0].mass == doctest::Approx(2.0 / 3.0));
  CHECK(prior[0].weights.sum() == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("class_split rejects bad labels and empty classes") {
  CHECK_THROWS_AS(class_split(make_dataset({{0.0}, {1.0}}, {1, 3}, 2)), DataError);
  try {
    class_split(make_dataset({{0.0}, {1.0}}, {1, 1}, 2));
    FAIL("expected an error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("class 2") != std::string::npos);
  }
}

TEST_CASE("empirical moment matrices by hand") {
  const auto single = empirical_moment_matrix(uniform_measure(column({0.0})), enumerate_basis(1, 1));
  CHECK(single.entries == Eigen::Matrix2d{{1, 0}, {0, 0}});

  const auto three = empirical_moment_matrix(uniform_measure(column({-1.0, 0.0, 1.0})),
                                             enumerate_basis(1, 1));
  CHECK(three.entries(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(three.entries(0, 1)) < 1e-15);
  CHECK(three.entries(1, 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(three.support_size == 3);
}

TEST_CASE("moment matrices are symmetric PSD with bounded rank") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 3;
    const int t = 1 + trial % 4;
    const std::size_t count = 1 + static_cast<std::size_t>(trial) * 3;
    const auto basis = enumerate_basis(n, t);
    const auto mm = empirical_moment_matrix(uniform_measure(random_points(rng, count, n)), basis);
    CHECK((mm.entries - mm.entries.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mm.entries);
    const double top = es.eigenvalues().maxCoeff();
    CHECK(es.eigenvalues().minCoeff() >= -1e-10 * top);
    const auto rank = static_cast<std::size_t>((es.eigenvalues().array() > 1e-10 * top).count());
    CHECK(rank <= std::min(basis.size(), count));
  }
}

TEST_CASE("moment assembly is order independent and linear in the weights") {
  Rng rng(5);
  auto measure = uniform_measure(random_points(rng, 40, 2));
  const auto basis = enumerate_basis(2, 3);
  const auto reference = empirical_moment_matrix(measure, basis);

  EmpiricalMeasure reversed = measure;
  reversed.points = measure.points.colwise().reverse();
  CHECK((empirical_moment_matrix(reversed, basis).entries - reference.entries).cwiseAbs().maxCoeff() <=
        1e-12);

  EmpiricalMeasure scaled = measure;
  scaled.weights *= 3.5;
  scaled.mass *= 3.5;
  const auto scaled_mm = empirical_moment_matrix(scaled, basis);
  CHECK((scaled_mm.entries - 3.5 * reference.entries).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("moment matrix input errors") {
  const auto basis = enumerate_basis(2, 1);
  CHECK_THROWS_AS(empirical_moment_matrix(uniform_measure(column({1.0})), basis), DataError);
  PointMatrix bad(1, 2);
  bad << 1.0, INFINITY;
  CHECK_THROWS_AS(empirical_moment_matrix(uniform_measure(bad), basis), DataError);
}

TEST_CASE("joint moment matrices") {
  const auto one = make_dataset({{0.0}}, {1}, 2);
  // y = 1 at the single point, so v = (1, x, y, xy) = (1, 0, 1, 0)
  const auto tensor = joint_moment_matrix(one, enumerate_tensor_basis(1, 1, 2));
  Eigen::Matrix4d expected = Eigen::Matrix4d::Zero();
  expected(0, 0) = expected(0, 2) = expected(2, 0) = expected(2, 2) = 1.0;
  CHECK(tensor.entries == expected);

  const auto two = make_dataset({{0.0}, {0.0}}, {1, 2}, 2);
  const auto basis = enumerate_variety_basis(1, 2, 2);
  const auto mm = joint_moment_matrix(two, basis);
  std::size_t y_index = basis.size();
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (basis[i].y_power == 1 && basis[i].x.degree() == 0) y_index = i;
  }
  REQUIRE(y_index < basis.size());
  const auto k = static_cast<Eigen::Index>(y_index);
  CHECK(mm.entries(k, k) == doctest::Approx(2.5));

  Rng rng(3);
  LabeledDataset random;
  random.points = random_points(rng, 25, 2);
  random.classes = 3;
  for (int i = 0; i < 25; ++i) random.labels.push_back(1 + i % 3);
  const auto joint = joint_moment_matrix(random, enumerate_tensor_basis(2, 2, 3));
  CHECK((joint.entries - joint.entries.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(joint.entries);
  CHECK(es.eigenvalues().minCoeff() >= -1e-10 * es.eigenvalues().maxCoeff());
}
