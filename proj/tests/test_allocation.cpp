#include "ccplan/allocation.hpp"
#include "ccplan/error.hpp"

#include "doctest.h"
#include "oracles.hpp"

#include <random>

using namespace ccplan;

namespace {

RiskAllocation make(std::vector<double> bounds, double joint, double tol, double rate = 0.5) {
  RiskAllocation a;
  a.bounds = std::move(bounds);
  a.joint_bound = joint;
  a.tolerance = tol;
  a.rate = rate;
  return a;
}

}  // namespace

TEST_CASE("uniform_allocation") {
  const auto five = uniform_allocation(0.1, 5);
  REQUIRE(five.bounds.size() == 5);
  for (double b : five.bounds) CHECK(b == doctest::Approx(0.02).epsilon(1e-15));
  CHECK(five.tolerance == doctest::Approx(0.05 * 0.02));
  CHECK(five.rate == 0.5);

  CHECK(uniform_allocation(0.1, 1).bounds == std::vector<double>{0.1});

  for (std::size_t n : {1u, 3u, 7u, 31u, 101u, 1000u}) {
    const auto a = uniform_allocation(0.1, n);
    CHECK(std::abs(a.total() - 0.1) <= 1e-15 * static_cast<double>(n));
  }

  CHECK(uniform_allocation(0.1, 4, 0.003).tolerance == 0.003);

  CHECK_THROWS_AS(uniform_allocation(0.1, 0), InvalidArgument);
  CHECK_THROWS_AS(uniform_allocation(0.0, 3), InvalidArgument);
  CHECK_THROWS_AS(uniform_allocation(1.0, 3), InvalidArgument);
  CHECK_THROWS_AS(uniform_allocation(-0.2, 3), InvalidArgument);
  CHECK_THROWS_AS(uniform_allocation(0.1, 3, -1.0), InvalidArgument);
  CHECK_THROWS_AS(uniform_allocation(0.1, 3, std::nullopt, 1.0), InvalidArgument);
}

TEST_CASE("risk_test classification") {
  const auto a = make({0.02, 0.02}, 0.1, 0.005);
  const auto r = risk_test({0.01, 0.2}, a);
  CHECK(r.classification[0] == ConstraintState::Inactive);
  CHECK(r.classification[1] == ConstraintState::Violated);
  CHECK(r.violation);

  const auto eq = risk_test({0.02, 0.02}, a);
  CHECK(eq.count(ConstraintState::Active) == 2);
  CHECK_FALSE(eq.violation);

  const auto zero = risk_test({0.0, 0.0}, a);
  CHECK(zero.count(ConstraintState::Inactive) == 2);

  const auto edge = risk_test({0.0155, 0.0149}, a);
  CHECK(edge.classification[0] == ConstraintState::Active);
  CHECK(edge.classification[1] == ConstraintState::Inactive);

  const auto clamped = risk_test({1.7, 0.0}, a);
  CHECK(clamped.risks[0] == 1.0);
  CHECK(clamped.violation);

  CHECK_THROWS_AS(risk_test({0.01}, a), InvalidArgument);
  CHECK(risk_test({0.01, -0.1}, a).risks[1] == 0.0);
}

TEST_CASE("reallocate hand-traced example") {
  const auto a = make({0.02, 0.02, 0.02, 0.02, 0.02}, 0.10, 0.005, 0.5);
  const auto out = reallocate({0.001, 0.001, 0.05, 0.001, 0.018}, a);
  const std::vector<double> expected{0.0105, 0.0105, 0.0485, 0.0105, 0.02};
  REQUIRE(out.bounds.size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    CHECK(std::abs(out.bounds[i] - expected[i]) <= 1e-12);
  }
  CHECK(out.joint_bound == a.joint_bound);
  CHECK(out.tolerance == a.tolerance);
  CHECK(out.rate == a.rate);
}

TEST_CASE("reallocate edge cases") {
  const auto single = reallocate({0.5}, make({0.1}, 0.1, 0.005));
  CHECK(single.bounds[0] == doctest::Approx(0.1).epsilon(1e-15));

  // Budget left over from an earlier under-allocation also goes to violators.
  const auto slack = reallocate({0.05, 0.01}, make({0.02, 0.01}, 0.1, 0.005));
  CHECK(slack.bounds[1] == 0.01);
  CHECK(slack.bounds[0] == doctest::Approx(0.09).epsilon(1e-15));

  CHECK_THROWS_AS(reallocate({0.0, 0.0}, make({0.05, 0.05}, 0.1, 0.005)), InvalidState);
  CHECK_THROWS_AS(reallocate({0.0}, make({0.05, 0.05}, 0.1, 0.005)), InvalidArgument);
}

TEST_CASE("reallocate properties over random allocations") {
  std::mt19937_64 gen(oracles::kAllocationSeed);
  int successes = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    CAPTURE(trial);
    const auto t = oracles::random_allocation_trial(gen);
    if (!risk_test(t.risks, t.allocation).violation) {
      CHECK_THROWS_AS(reallocate(t.risks, t.allocation), InvalidState);
      continue;
    }
    ++successes;
    CHECK(oracles::allocation_invariant_violation(t, reallocate(t.risks, t.allocation)) == "");
  }
  CHECK(successes > 500);
}
