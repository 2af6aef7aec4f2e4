#include "lpasim/pacing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lpasim {

double uniform_bid(double factor, const SellerProfile& seller,
                   const Request& request) {
  if (!(factor >= 0.0 && factor <= 1.0)) {
    throw std::invalid_argument("pacing factor must lie in [0, 1]");
  }
  return uniform_bid_value(
      factor, 1.0 / seller.roi_target,
      request.values.at(static_cast<std::size_t>(seller.id)));
}

double pacing_update(double factor, double budget, std::size_t horizon,
                     double paid, double learning_rate) {
  if (!std::isfinite(factor) || !std::isfinite(paid) ||
      !std::isfinite(learning_rate)) {
    throw std::invalid_argument("pacing_update: inputs must be finite");
  }
  if (!(budget > 0.0) || horizon == 0) {
    throw std::invalid_argument("pacing_update: budget and horizon must be "
                                "positive");
  }
  const double next =
      factor +
      learning_rate * (budget / static_cast<double>(horizon) - paid);
  return std::clamp(next, 0.0, 1.0);
}

std::vector<double> uniform_bids(std::span<const double> factors,
                                 const Dataset& dataset, std::size_t t) {
  const std::size_t n = dataset.sellers.size();
  const Request& q = dataset.requests[t];
  std::vector<double> bids(n);
  for (std::size_t i = 0; i < n; ++i) {
    bids[i] = uniform_bid_value(
        factors[i], 1.0 / dataset.sellers[i].roi_target, q.values[i]);
  }
  return bids;
}

SimulationTrace simulate_online(const Dataset& dataset, AuctionRule rule,
                                double learning_rate) {
  dataset.validate();
  if (!std::isfinite(learning_rate) || learning_rate < 0.0) {
    throw std::invalid_argument("learning rate must be non-negative");
  }
  const std::size_t n = dataset.sellers.size();
  const std::size_t horizon = dataset.request_count();

  SimulationTrace trace;
  trace.steps = horizon;
  trace.seller_count = static_cast<int>(n);
  trace.factors.reserve(horizon * n);
  trace.payments.reserve(horizon * n);
  trace.outcomes.reserve(horizon);

  PacingState state;
  state.factors.assign(n, 1.0);
  state.cumulative_spend.assign(n, 0.0);
  state.learning_rate = learning_rate;
  for (std::size_t t = 0; t < horizon; ++t) {
    trace.factors.insert(trace.factors.end(), state.factors.begin(),
                         state.factors.end());
    const std::vector<double> bids = uniform_bids(state.factors, dataset, t);
    AuctionOutcome out = run_auction(dataset.requests[t], bids,
                                     dataset.sellers, dataset.slots,
                                     dataset.experience_weight, rule);
    trace.payments.insert(trace.payments.end(), out.payments.begin(),
                          out.payments.end());
    for (std::size_t i = 0; i < n; ++i) {
      state.cumulative_spend[i] += out.payments[i];
      state.factors[i] =
          pacing_update(state.factors[i], dataset.sellers[i].budget, horizon,
                        out.payments[i], state.learning_rate);
    }
    trace.outcomes.push_back(std::move(out));
  }
  trace.final_factors = state.factors;
  trace.metrics = compute_metrics(dataset, trace.outcomes, /*truncate=*/true);
  return trace;
}

std::vector<AuctionOutcome> run_offline(const Dataset& dataset,
                                        std::span<const double> factors,
                                        AuctionRule rule) {
  dataset.validate();
  if (factors.size() != dataset.sellers.size()) {
    throw std::invalid_argument("factor count does not match seller count");
  }
  for (double a : factors) {
    if (!(a >= 0.0 && a <= 1.0)) {
      throw std::invalid_argument("pacing factors must lie in [0, 1]");
    }
  }
  std::vector<AuctionOutcome> outcomes;
  outcomes.reserve(dataset.request_count());
  for (std::size_t t = 0; t < dataset.request_count(); ++t) {
    const std::vector<double> bids = uniform_bids(factors, dataset, t);
    outcomes.push_back(run_auction(dataset.requests[t], bids, dataset.sellers,
                                   dataset.slots, dataset.experience_weight,
                                   rule));
  }
  return outcomes;
}

}  // namespace lpasim
