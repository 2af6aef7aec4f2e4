#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "lpasim/equilibrium.hpp"
#include "lpasim/rng.hpp"
#include "support/fixtures.hpp"

using namespace lpasim;

TEST_CASE("expected payment basics") {
  // a zero factor with no experience boost never wins against a live bid
  {
    Dataset ds = test::two_seller_step_fixture();
    CHECK(expected_payment(0, std::vector<double>{0.0, 1.0}, ds) == 0.0);
  }
  // a lone seller always takes the slot and pays its value
  {
    Dataset ds;
    ds.sellers = {{0, 1000.0, 1.0}};
    ds.requests = {{"0", {2.0}, {0.0}},
                   {"1", {4.0}, {0.0}},
                   {"2", {6.0}, {0.0}}};
    ds.slots = SlotLayout{{1.0}};
    ds.experience_weight = 0.0;
    CHECK(expected_payment(0, std::vector<double>{1.0}, ds) ==
          doctest::Approx(4.0));
  }
  // step fixture at full throttle: seller 0 wins and pays 10
  {
    Dataset ds = test::two_seller_step_fixture();
    CHECK(expected_payment(0, std::vector<double>{1.0, 1.0}, ds) ==
          doctest::Approx(10.0));
  }
}

TEST_CASE("min pacing returns zero when the target is already met") {
  Dataset ds;
  ds.sellers = {{0, 1000.0, 1.0}};
  ds.requests = {{"0", {4.0}, {0.0}}};
  ds.slots = SlotLayout{{1.0}};
  ds.experience_weight = 0.0;
  CHECK(min_pacing_to_spend(0, std::vector<double>{1.0}, 1.0, 1.0, ds,
                            1e-4) == 0.0);
}

TEST_CASE("min pacing lands on the step fixture's jump") {
  const Dataset ds = test::two_seller_step_fixture();
  const double delta = 1e-4;
  const double result = min_pacing_to_spend(0, std::vector<double>{1.0, 1.0},
                                            4.0, 1.0, ds, delta);
  CHECK(result >= 0.8);
  CHECK(result <= 0.8 + delta);
}

TEST_CASE("min pacing throws when the target is unreachable") {
  const Dataset ds = test::two_seller_step_fixture();
  CHECK_THROWS_AS(min_pacing_to_spend(0, std::vector<double>{1.0, 1.0}, 50.0,
                                      1.0, ds, 1e-4),
                  std::logic_error);
}

TEST_CASE("min pacing agrees with a grid-scan oracle") {
  // seller 0's payment steps up at a = 5/v as its factor crosses each
  // request's threshold against the constant competitor
  Dataset ds;
  ds.sellers = {{0, 100.0, 1.0}, {1, 100.0, 1.0}};
  for (int t = 0; t < 10; ++t) {
    ds.requests.push_back({std::to_string(t),
                           {static_cast<double>(t + 1), 5.0},
                           {0.0, 0.0}});
  }
  ds.slots = SlotLayout{{1.0}};
  ds.experience_weight = 0.0;

  const double delta = 1e-3;
  const std::vector<double> profile = {1.0, 1.0};
  for (double target : {1.0, 2.5, 3.9}) {
    const double result =
        min_pacing_to_spend(0, profile, target, 1.0, ds, delta);
    CHECK(expected_payment(0, std::vector<double>{result, 1.0}, ds) >= target);

    // independent oracle: scan the factor grid at delta/10 resolution
    double oracle = 1.0;
    std::vector<double> trial = profile;
    for (double a = 0.0; a <= 1.0; a += delta / 10.0) {
      trial[0] = a;
      if (expected_payment(0, trial, ds) >= target) {
        oracle = a;
        break;
      }
    }
    CHECK(std::abs(result - oracle) <= delta + delta / 10.0);
  }
}

TEST_CASE("equilibrium on the step fixture") {
  const Dataset ds = test::two_seller_step_fixture();
  const double delta = 1e-4;
  const EquilibriumResult eq = compute_equilibrium(ds, 0.01, delta);
  REQUIRE(eq.factors.size() == 2);
  CHECK(eq.factors[0] >= 0.8);
  CHECK(eq.factors[0] <= 0.8 + delta);
  CHECK(eq.factors[1] == 1.0);
  CHECK(eq.iterations == 1);
  CHECK(eq.expected_payments[0] == doctest::Approx(10.0));
}

TEST_CASE("loose budgets leave every factor at one") {
  Dataset ds = test::two_seller_step_fixture();
  ds.sellers[0].budget = 1000.0;
  const EquilibriumResult eq = compute_equilibrium(ds, 0.01, 1e-4);
  CHECK(eq.factors == std::vector<double>{1.0, 1.0});
  CHECK(eq.iterations == 0);
}

TEST_CASE("equilibrium rejects bad tolerances and scan orders") {
  const Dataset ds = test::two_seller_step_fixture();
  CHECK_THROWS_AS(compute_equilibrium(ds, 0.5, 1e-4), std::invalid_argument);
  CHECK_THROWS_AS(compute_equilibrium(ds, 0.6, 1e-4), std::invalid_argument);
  CHECK_THROWS_AS(compute_equilibrium(ds, -0.1, 1e-4), std::invalid_argument);
  CHECK_THROWS_AS(compute_equilibrium(ds, 0.01, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(compute_equilibrium(ds, 0.01, 0.002), std::invalid_argument);
  const std::vector<int> bad_order = {0, 0};
  CHECK_THROWS_AS(compute_equilibrium(ds, 0.01, 1e-4, bad_order),
                  std::invalid_argument);
}

TEST_CASE("factors only decrease and iterations stay within the bound") {
  for (std::uint64_t seed : {7u, 19u, 31u, 57u}) {
    const Dataset ds = test::small_synthetic(seed, 6, 200);
    const double epsilon = 0.02;
    const EquilibriumResult eq = compute_equilibrium(ds, epsilon, 2e-4);
    CHECK(eq.iterations <=
          static_cast<int>(std::ceil(6.0 / epsilon)));
    for (const EquilibriumResult::Update& update : eq.updates) {
      CHECK(update.to < update.from);
    }
    for (double a : eq.factors) {
      CHECK(a >= 0.0);
      CHECK(a <= 1.0);
    }
    const VerifyReport report =
        verify_epsilon_equilibrium(eq.factors, epsilon, ds);
    CHECK(report.pass);
  }
}

TEST_CASE("verifier reports condition violations with margins") {
  // budget so small that an epsilon cut still overspends
  {
    Dataset ds = test::two_seller_step_fixture();
    ds.sellers[0].budget = 0.5;
    const VerifyReport report = verify_epsilon_equilibrium(
        std::vector<double>{1.0, 1.0}, 0.01, ds);
    CHECK_FALSE(report.pass);
    REQUIRE(report.violations.size() >= 1);
    CHECK(report.violations[0].seller == 0);
    CHECK(report.violations[0].condition == 1);
    CHECK(report.violations[0].margin > 0.0);
  }
  // all-zero profile underspends a large budget at the epsilon probe
  {
    Dataset ds = test::two_seller_step_fixture();
    const VerifyReport report = verify_epsilon_equilibrium(
        std::vector<double>{0.0, 0.0}, 0.01, ds);
    CHECK_FALSE(report.pass);
    bool found_condition2 = false;
    for (const VerifyReport::Violation& v : report.violations) {
      if (v.condition == 2) found_condition2 = true;
    }
    CHECK(found_condition2);
  }
}

TEST_CASE("payment is monotone in own factor and antitone in others") {
  SplitMix64 gen(321);
  int probes = 0;
  while (probes < 300) {
    const int n = 2 + static_cast<int>(gen.next() % 4);
    const Dataset ds =
        test::small_synthetic(9000 + static_cast<std::uint64_t>(probes), n, 30);
    std::vector<double> base =
        test::random_profile(gen, static_cast<std::size_t>(n));
    const int i = static_cast<int>(gen.next() % static_cast<std::uint64_t>(n));
    const double bump =
        0.05 + static_cast<double>(gen.next() % 1000) / 2000.0;

    const double before = expected_payment(i, base, ds);
    std::vector<double> raised = base;
    raised[static_cast<std::size_t>(i)] =
        std::min(1.0, raised[static_cast<std::size_t>(i)] + bump);
    CHECK(expected_payment(i, raised, ds) >= before - 1e-12);

    int j = static_cast<int>(gen.next() % static_cast<std::uint64_t>(n));
    if (j == i) j = (j + 1) % n;
    std::vector<double> other = base;
    other[static_cast<std::size_t>(j)] =
        std::min(1.0, other[static_cast<std::size_t>(j)] + bump);
    CHECK(expected_payment(i, other, ds) <= before + 1e-12);
    ++probes;
  }
}

TEST_CASE("scan order changes the path but stays near the same profile") {
  const Dataset ds = test::small_synthetic(77, 5, 150);
  const EquilibriumResult base = compute_equilibrium(ds, 0.01, 1e-4);
  SplitMix64 gen(5);
  const std::vector<int> order = test::random_permutation(gen, 5);
  const EquilibriumResult permuted =
      compute_equilibrium(ds, 0.01, 1e-4, order);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(std::abs(base.factors[i] - permuted.factors[i]) <= 0.05);
  }
}
