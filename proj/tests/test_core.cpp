#include "teleop/core.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace teleop;

TEST_CASE("make_joint_vector basic construction") {
  auto zero = make_joint_vector({0, 0, 0, 0, 0, 0, 0});
  CHECK(zero.isZero());

  auto v = make_joint_vector({1, 2, 3, 4, 5, 6, 7});
  for (int i = 0; i < kNumJoints; ++i) CHECK(v[i] == doctest::Approx(i + 1));
}

TEST_CASE("make_joint_vector rejects non-finite elements naming the index") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  try {
    make_joint_vector({0, 0, nan, 0, 0, 0, 0});
    FAIL("expected throw");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("2") != std::string::npos);
  }
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(make_joint_vector({inf, 0, 0, 0, 0, 0, 0}), std::invalid_argument);
}

TEST_CASE("make_joint_vector rejects wrong arity") {
  double three[] = {1, 2, 3};
  CHECK_THROWS_AS(make_joint_vector(three, 3), std::invalid_argument);
}

TEST_CASE("rng streams are deterministic per (seed, id)") {
  RngStream a(42, 7), b(42, 7);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_uniform() == b.next_uniform());
}

TEST_CASE("rng streams with distinct ids differ") {
  RngStream a(1, 0), b(1, 1);
  bool any_diff = false;
  for (int i = 0; i < 1000; ++i) {
    if (a.next_uniform() != b.next_uniform()) any_diff = true;
  }
  CHECK(any_diff);
}

TEST_CASE("rng uniform draws stay in [0,1)") {
  RngStream rng(123, 0);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.next_uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("gamma sampler matches analytic mean") {
  RngStream rng(99, 0);
  const double shape = 2.5, scale = 400.0;
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) sum += rng.next_gamma(shape, scale);
  CHECK(sum / n == doctest::Approx(shape * scale).epsilon(0.02));
}

TEST_CASE("derive_seed decorrelates indices") {
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0, 0) != derive_seed(1, 0, 1));
  CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
}
