#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "lpasim/equilibrium.hpp"
#include "lpasim/oracle.hpp"
#include "lpasim/pacing.hpp"
#include "lpasim/rng.hpp"
#include "support/fixtures.hpp"

using namespace lpasim;

TEST_CASE("dual value on hand-traced fixtures") {
  // all multipliers at one: greedy mass of value/roi, no slack term
  {
    Dataset ds;
    ds.sellers = {{0, 10.0, 1.0}, {1, 10.0, 2.0}};
    ds.requests = {{"0", {4.0, 6.0}, {0.0, 0.0}}};
    ds.slots = SlotLayout{{1.0}};
    ds.experience_weight = 0.0;
    CHECK(dual_value(std::vector<double>{1.0, 1.0}, ds) ==
          doctest::Approx(4.0));
  }
  // all multipliers at zero: experience mass plus the full budget rates
  {
    Dataset ds;
    ds.sellers = {{0, 10.0, 1.0}, {1, 20.0, 1.0}};
    ds.requests = {{"0", {7.0, 9.0}, {1.0, 2.0}}};
    ds.slots = SlotLayout{{1.0}};
    ds.experience_weight = 2.0;
    CHECK(dual_value(std::vector<double>{0.0, 0.0}, ds) ==
          doctest::Approx(4.0 + 30.0));
  }
  // step fixture: documented atom case with a real gap
  {
    const Dataset ds = test::two_seller_step_fixture();
    const std::vector<double> profile = {0.8, 1.0};
    CHECK(dual_value(profile, ds) == doctest::Approx(8.8).epsilon(1e-12));
    CHECK(primal_value(profile, ds) == doctest::Approx(4.0));
    CHECK(duality_gap(profile, ds) == doctest::Approx(4.8).epsilon(1e-12));
  }
}

TEST_CASE("primal value on degenerate allocations") {
  // zero bids still fill slots; a lone seller keeps its exposure
  Dataset ds;
  ds.sellers = {{0, 1000.0, 1.0}};
  ds.requests = {{"0", {1.0}, {0.0}}};
  ds.slots = SlotLayout{{1.0}};
  ds.experience_weight = 0.0;
  CHECK(primal_value(std::vector<double>{0.0}, ds) == doctest::Approx(1.0));
}

TEST_CASE("primal value matches the metrics module") {
  const Dataset ds = test::small_synthetic(13, 4, 50);
  SplitMix64 gen(8);
  const std::vector<double> factors = test::random_profile(gen, 4);
  const std::vector<AuctionOutcome> outcomes =
      run_offline(ds, factors, AuctionRule::lpa);
  const MetricsReport metrics = compute_metrics(ds, outcomes, true);
  CHECK(primal_value(factors, ds) * static_cast<double>(ds.request_count()) ==
        doctest::Approx(metrics.obj).epsilon(1e-14));
}

TEST_CASE("weak duality holds over random multiplier-profile pairs") {
  SplitMix64 gen(555);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(gen.next() % 4);
    const Dataset ds = test::small_synthetic(
        2000 + static_cast<std::uint64_t>(trial), n, 25);
    const std::vector<double> lambda =
        test::random_profile(gen, static_cast<std::size_t>(n));
    const std::vector<double> factors =
        test::random_profile(gen, static_cast<std::size_t>(n));
    CHECK(dual_value(lambda, ds) >= primal_value(factors, ds) - 1e-9);
  }
}

TEST_CASE("dual value is convex along coordinate segments") {
  SplitMix64 gen(777);
  for (int trial = 0; trial < 60; ++trial) {
    const Dataset ds = test::small_synthetic(
        3000 + static_cast<std::uint64_t>(trial), 4, 30);
    std::vector<double> lambda = test::random_profile(gen, 4);
    const std::size_t i = gen.next() % 4;
    const double x1 = static_cast<double>(gen.next() >> 11) * 0x1.0p-53;
    const double x2 = static_cast<double>(gen.next() >> 11) * 0x1.0p-53;

    std::vector<double> at1 = lambda, at2 = lambda, mid = lambda;
    at1[i] = x1;
    at2[i] = x2;
    mid[i] = 0.5 * (x1 + x2);
    const double bound = 0.5 * (dual_value(at1, ds) + dual_value(at2, ds));
    CHECK(dual_value(mid, ds) <= bound + 1e-9 * std::max(1.0, bound));
  }
}

TEST_CASE("refined certificate never exceeds the plain dual") {
  const Dataset ds = test::small_synthetic(4242, 5, 100);
  const EquilibriumResult eq = compute_equilibrium(ds, 0.01, 1e-4);
  const double plain = dual_value(eq.factors, ds);
  const DualCertificate cert = refine_certificate(eq.factors, ds, 0.01, 2);
  CHECK(cert.dual <= plain + 1e-12);
  CHECK(cert.primal == doctest::Approx(primal_value(eq.factors, ds)));
  CHECK(cert.gap >= -1e-9);
}

TEST_CASE("perturbing a binding coordinate widens the gap") {
  const Dataset ds = test::two_seller_step_fixture();
  const EquilibriumResult eq = compute_equilibrium(ds, 0.01, 1e-4);
  const double at_equilibrium = duality_gap(eq.factors, ds);
  std::vector<double> perturbed = eq.factors;
  perturbed[0] = std::min(1.0, perturbed[0] + 0.2);
  CHECK(duality_gap(perturbed, ds) > at_equilibrium);
}

TEST_CASE("tie rate flags atom-heavy data") {
  Dataset atoms;
  atoms.sellers = {{0, 10.0, 1.0}, {1, 10.0, 1.0}};
  atoms.requests = {{"0", {1.0, 1.0}, {0.0, 0.0}},
                    {"1", {1.0, 1.0}, {0.0, 0.0}}};
  atoms.slots = SlotLayout{{1.0}};
  atoms.experience_weight = 0.0;
  CHECK(score_tie_rate(atoms, std::vector<double>{1.0, 1.0}) == 1.0);

  const Dataset smooth = test::small_synthetic(31, 3, 40);
  CHECK(score_tie_rate(smooth, std::vector<double>{1.0, 1.0, 1.0}) == 0.0);
}

TEST_CASE("underreporting roi inflates the liquid payment") {
  const Request q{"q", {10.0, 2.0}, {0.0, 0.0}};
  const SlotLayout slots{{1.0}};
  const std::vector<double> bids = {5.0, 1.0};
  const std::vector<SellerProfile> honest = {{0, 100.0, 2.0}, {1, 100.0, 1.0}};
  const std::vector<SellerProfile> shaded = {{0, 100.0, 1.0}, {1, 100.0, 1.0}};
  const double p_honest =
      run_auction(q, bids, honest, slots, 0.0, AuctionRule::lpa).payments[0];
  const double p_shaded =
      run_auction(q, bids, shaded, slots, 0.0, AuctionRule::lpa).payments[0];
  CHECK(p_shaded == doctest::Approx(2.0 * p_honest));
}

TEST_CASE("misreport grid: truthful cell is feasible and optimal") {
  const Dataset ds = test::small_synthetic(60, 3, 100);
  const std::vector<double> factors = {0.5, 1.0, 2.0};
  for (int seller = 0; seller < 3; ++seller) {
    const MisreportGrid grid = ic_probe(seller, ds, factors, 0.01, 1e-4);
    REQUIRE(grid.cells.size() == 9);
    CHECK(grid.truthful().budget_factor == 1.0);
    CHECK(grid.truthful().roi_factor == 1.0);
    CHECK(grid.truthful().feasible);
    CHECK_FALSE(grid.has_feasible_improvement(0.005));

    // the truthful cell must reproduce the unmodified equilibrium outcome
    const EquilibriumResult eq = compute_equilibrium(ds, 0.01, 1e-4);
    const std::vector<AuctionOutcome> outcomes =
        run_offline(ds, eq.factors, AuctionRule::lpa);
    const MetricsReport metrics = compute_metrics(ds, outcomes, true);
    const std::size_t si = static_cast<std::size_t>(seller);
    const double truthful_objective =
        std::min(ds.sellers[si].budget,
                 (1.0 / ds.sellers[si].roi_target) * metrics.sales_value[si]);
    CHECK(grid.truthful().true_objective ==
          doctest::Approx(truthful_objective).epsilon(1e-14));
  }
}

TEST_CASE("misreport grid rejects grids without the truthful factor") {
  const Dataset ds = test::small_synthetic(61, 2, 20);
  CHECK_THROWS_AS(ic_probe(0, ds, std::vector<double>{0.5, 2.0}, 0.01, 1e-4),
                  std::invalid_argument);
  CHECK_THROWS_AS(ic_probe(5, ds, std::vector<double>{1.0}, 0.01, 1e-4),
                  std::invalid_argument);
}
