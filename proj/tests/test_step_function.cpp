#include <doctest.h>

#include <stdexcept>

#include "semimed/step_function.hpp"

using semimed::StepFunction;

TEST_CASE("value and left_value around jumps") {
  StepFunction f({1.0, 2.0, 4.0}, {0.5, 0.25, 0.25});
  CHECK(f.value(0.0) == 0.0);
  CHECK(f.value(0.999) == 0.0);
  CHECK(f.value(1.0) == 0.5);
  CHECK(f.left_value(1.0) == 0.0);
  CHECK(f.value(1.5) == 0.5);
  CHECK(f.value(2.0) == 0.75);
  CHECK(f.left_value(2.0) == 0.5);
  CHECK(f.value(3.9) == 0.75);
  CHECK(f.value(4.0) == 1.0);
  CHECK(f.value(100.0) == 1.0);
  CHECK(f.last_value() == 1.0);
}

TEST_CASE("empty function is identically zero") {
  StepFunction f;
  CHECK(f.value(3.0) == 0.0);
  CHECK(f.left_value(3.0) == 0.0);
  CHECK(f.empty());
}

TEST_CASE("from_values keeps the sampled values exactly") {
  StepFunction f = StepFunction::from_values({1.0, 2.0, 3.0}, {0.1, 0.1, 0.7});
  CHECK(f.value(1.0) == 0.1);
  CHECK(f.value(2.5) == 0.1);
  CHECK(f.value(3.0) == 0.7);
  CHECK(f.left_value(3.0) == 0.1);
}

TEST_CASE("constructor rejects malformed input") {
  CHECK_THROWS_AS(StepFunction({2.0, 1.0}, {0.1, 0.1}), std::invalid_argument);
  CHECK_THROWS_AS(StepFunction({1.0, 1.0}, {0.1, 0.1}), std::invalid_argument);
  CHECK_THROWS_AS(StepFunction({1.0}, {0.1, 0.2}), std::invalid_argument);
}

TEST_CASE("union of jump times") {
  StepFunction a({1.0, 3.0}, {1.0, 1.0});
  StepFunction b({2.0, 3.0}, {1.0, 1.0});
  auto u = semimed::union_jump_times({&a, &b});
  CHECK(u == std::vector<double>{1.0, 2.0, 3.0});
}
