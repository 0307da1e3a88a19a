#include "dtap/simplex.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

namespace {

using dtap::Policy;
using dtap::project_to_simplex;
using Eigen::VectorXd;

VectorXd vec(std::initializer_list<double> values) {
  VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

VectorXd random_vector(std::mt19937_64& rng, int n, double spread = 2.0) {
  std::uniform_real_distribution<double> u(-spread, spread);
  VectorXd v(n);
  for (int k = 0; k < n; ++k) v[k] = u(rng);
  return v;
}

Policy random_policy(std::mt19937_64& rng, int n) {
  std::exponential_distribution<double> e(1.0);
  VectorXd v(n);
  for (int k = 0; k < n; ++k) v[k] = e(rng);
  return Policy(v / v.sum());
}

}  // namespace

TEST_CASE("policy construction enforces the simplex") {
  CHECK_NOTHROW(Policy(vec({0.2, 0.3, 0.5})));
  CHECK_THROWS_AS(Policy{VectorXd()}, std::invalid_argument);
  CHECK_THROWS_AS(Policy(vec({0.5, 0.6})), std::invalid_argument);
  CHECK_THROWS_AS(Policy(vec({-0.1, 1.1})), std::invalid_argument);
  CHECK_THROWS_AS(Policy(vec({NAN, 1.0})), std::invalid_argument);
  CHECK(Policy::uniform(4)[2] == doctest::Approx(0.25));
  CHECK(Policy::point_mass(3, 1)[1] == 1.0);
}

TEST_CASE("projection of points already on the simplex is the identity") {
  const auto p = project_to_simplex(vec({0.2, 0.3, 0.5}));
  CHECK((p.probs() - vec({0.2, 0.3, 0.5})).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("projection splits symmetric excess evenly") {
  const auto p = project_to_simplex(vec({0.6, 0.6}));
  CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(p[1] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("projection matches active-set enumeration") {
  std::mt19937_64 rng(7);
  for (double floor : {0.0, 0.01, 0.05}) {
    for (int trial = 0; trial < 1000; ++trial) {
      const int n = 2 + trial % 5;
      const VectorXd v = random_vector(rng, n);
      const auto p = project_to_simplex(v, floor);
      const VectorXd expected = dtap::oracle::brute_force_projection(v, floor);
      REQUIRE(expected.size() == n);
      CHECK((p.probs() - expected).cwiseAbs().maxCoeff() < 1e-9);
      CHECK(p.probs().minCoeff() >= floor - 1e-12);
    }
  }
}

TEST_CASE("no grid point beats the projection by more than the grid step") {
  std::mt19937_64 rng(11);
  const double step = 0.005;
  for (double floor : {0.0, 0.02}) {
    for (int trial = 0; trial < 40; ++trial) {
      const Eigen::Vector3d v = random_vector(rng, 3, 1.5);
      const auto p = project_to_simplex(VectorXd(v), floor);
      const double d = (p.probs() - VectorXd(v)).norm();
      CHECK(d <= dtap::oracle::grid_min_distance3(v, floor, step) + step);
    }
  }
}

TEST_CASE("projection is idempotent") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 2 + trial % 5;
    const double floor = (trial % 3) * 0.01;
    const auto once = project_to_simplex(random_vector(rng, n), floor);
    const auto twice = project_to_simplex(once.probs(), floor);
    CHECK((once.probs() - twice.probs()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("projection rejects bad input") {
  CHECK_THROWS_AS(project_to_simplex(VectorXd()), std::invalid_argument);
  CHECK_THROWS_AS(project_to_simplex(vec({1.0, INFINITY})), std::invalid_argument);
  CHECK_THROWS_AS(project_to_simplex(vec({0.5, 0.5}), 0.5), std::invalid_argument);
  CHECK_THROWS_AS(project_to_simplex(vec({0.5, 0.5}), -0.1), std::invalid_argument);
  CHECK_NOTHROW(project_to_simplex(vec({0.5, 0.5}), 0.49));
}

TEST_CASE("entropy of reference distributions") {
  CHECK(dtap::entropy(Policy::uniform(4)) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(dtap::entropy(Policy(vec({1, 0, 0}))) == 0.0);
  CHECK(dtap::entropy(Policy(vec({0.5, 0.25, 0.25}))) == 1.5);
  for (int n = 2; n <= 5; ++n) {
    CHECK(std::abs(dtap::entropy(Policy::uniform(n)) - std::log2(double(n))) < 1e-12);
  }
}

TEST_CASE("entropy is bounded and permutation invariant") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + trial % 6;
    const auto p = random_policy(rng, n);
    const double h = dtap::entropy(p);
    CHECK(h >= 0.0);
    CHECK(h <= std::log2(double(n)) + 1e-12);

    VectorXd shuffled = p.probs();
    std::shuffle(shuffled.data(), shuffled.data() + n, rng);
    CHECK(dtap::entropy(Policy(shuffled)) == doctest::Approx(h).epsilon(1e-12));
  }
}

TEST_CASE("sampling a point mass always returns its index") {
  std::mt19937_64 rng(1);
  const Policy p(vec({1, 0}));
  for (int i = 0; i < 1000; ++i) CHECK(dtap::sample(p, rng) == 0);
  const Policy q(vec({0, 0, 1}));
  for (int i = 0; i < 1000; ++i) CHECK(dtap::sample(q, rng) == 2);
}

TEST_CASE("sampling consumes exactly one draw and is reproducible") {
  const Policy p(vec({0.5, 0.5}));
  std::mt19937_64 a(99), b(99), c(99);
  std::vector<Eigen::Index> first, second;
  for (int i = 0; i < 200; ++i) {
    first.push_back(dtap::sample(p, a));
    second.push_back(dtap::sample(p, b));
    c.discard(1);
  }
  CHECK(first == second);
  CHECK(a == c);
}

TEST_CASE("sampling frequencies follow the policy") {
  std::mt19937_64 rng(2024);
  const Policy p(vec({0.2, 0.8}));
  int zeros = 0;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) zeros += dtap::sample(p, rng) == 0 ? 1 : 0;
  CHECK(std::abs(double(zeros) / draws - 0.2) < 0.01);
}
