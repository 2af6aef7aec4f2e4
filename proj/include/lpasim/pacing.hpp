#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lpasim/auctions.hpp"

namespace lpasim {

struct PacingState {
  std::vector<double> factors;           // each in [0, 1]
  std::vector<double> cumulative_spend;  // non-decreasing
  double learning_rate = 0.01;
};

/// Full record of an online run: the factor vector in effect at each step,
/// the per-step payments, every auction outcome, and the settled metrics.
struct SimulationTrace {
  std::size_t steps = 0;
  int seller_count = 0;
  std::vector<double> factors;   // steps x n, row-major
  std::vector<double> payments;  // steps x n, row-major
  std::vector<double> final_factors;
  std::vector<AuctionOutcome> outcomes;
  MetricsReport metrics;  // budget-truncated settlement

  double factor_at(std::size_t step, int seller) const {
    return factors[step * static_cast<std::size_t>(seller_count) +
                   static_cast<std::size_t>(seller)];
  }
  double payment_at(std::size_t step, int seller) const {
    return payments[step * static_cast<std::size_t>(seller_count) +
                    static_cast<std::size_t>(seller)];
  }
};

/// Value-proportional bid: factor * (1/roi_target) * value.
double uniform_bid(double factor, const SellerProfile& seller,
                   const Request& request);

/// One controller step: factor + rate * (budget/horizon - paid), clamped to
/// [0, 1].
double pacing_update(double factor, double budget, std::size_t horizon,
                     double paid, double learning_rate);

/// Bid vector for request t under a static pacing profile.
std::vector<double> uniform_bids(std::span<const double> factors,
                                 const Dataset& dataset, std::size_t t);

/// Repeated-auction simulation: factors start at 1, every bidder updates on
/// its own per-step payment (including zeros), budgets are enforced only at
/// settlement.
SimulationTrace simulate_online(const Dataset& dataset, AuctionRule rule,
                                double learning_rate);

/// Evaluates a fixed pacing profile over every request, no learning.
std::vector<AuctionOutcome> run_offline(const Dataset& dataset,
                                        std::span<const double> factors,
                                        AuctionRule rule);

}  // namespace lpasim
