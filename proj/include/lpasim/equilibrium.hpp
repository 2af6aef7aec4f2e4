#pragma once

#include <span>
#include <vector>

#include "lpasim/auctions.hpp"

namespace lpasim {

struct EquilibriumResult {
  std::vector<double> factors;
  int iterations = 0;  // number of factor updates
  std::vector<double> expected_payments;
  double epsilon = 0.0;
  double delta = 0.0;

  struct Update {
    int seller;
    double from;
    double to;
  };
  std::vector<Update> updates;
};

struct VerifyReport {
  struct Violation {
    int seller;
    int condition;  // 1: overspends after an epsilon cut, 2: underspends
    double margin;  // positive amount by which the condition fails
  };
  bool pass = true;
  std::vector<Violation> violations;
};

/// Mean per-request payment of one seller under a static pacing profile.
double expected_payment(int seller, std::span<const double> factors,
                        const Dataset& dataset,
                        AuctionRule rule = AuctionRule::lpa);

/// Smallest factor (up to the bracket width `delta`) at which the seller's
/// expected payment reaches `target`, holding the other factors fixed.
/// Returns the upper endpoint of the final bisection bracket, so the target
/// is guaranteed to be met at the returned value. Entry `seller` of
/// `factors` is ignored. Requires the target to be reachable at `hi`.
double min_pacing_to_spend(int seller, std::span<const double> factors,
                           double target, double hi, const Dataset& dataset,
                           double delta);

/// Best-response descent from the all-ones profile: while some seller would
/// still overspend after an epsilon cut, lower that seller's factor to its
/// minimal budget-feasible value. Scans sellers in `scan_order` (ascending
/// index when empty) and restarts the scan after every update. The output
/// always satisfies verify_epsilon_equilibrium.
EquilibriumResult compute_equilibrium(const Dataset& dataset, double epsilon,
                                      double delta,
                                      std::span<const int> scan_order = {});

/// Independent check of both epsilon-equilibrium conditions per seller,
/// evaluated through the generic per-request auction path.
VerifyReport verify_epsilon_equilibrium(std::span<const double> factors,
                                        double epsilon,
                                        const Dataset& dataset);

}  // namespace lpasim
