#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace lpasim {

/// Slot exposure profile. Rates are decreasing and lie in (0, 1]; slots past
/// the last one expose nothing.
struct SlotLayout {
  std::vector<double> exposure_rates;

  int slot_count() const { return static_cast<int>(exposure_rates.size()); }

  /// Exposure of the 1-based rank, 0 beyond the last slot.
  double exposure_at_rank(int rank) const {
    return rank >= 1 && rank <= slot_count() ? exposure_rates[rank - 1] : 0.0;
  }

  void validate() const;
};

/// One user request: per-seller expected sales value and experience score,
/// both per unit of exposure.
struct Request {
  std::string id;
  std::vector<double> values;
  std::vector<double> experiences;
};

struct SellerProfile {
  int id = 0;
  double budget = 0.0;      // > 0
  double roi_target = 0.0;  // > 0

  /// Sales cap implied by budget and ROI target.
  double stock_value() const { return roi_target * budget; }
};

struct Dataset {
  std::vector<SellerProfile> sellers;
  std::vector<Request> requests;
  SlotLayout slots;
  double experience_weight = 1.0;

  int seller_count() const { return static_cast<int>(sellers.size()); }
  std::size_t request_count() const { return requests.size(); }

  /// Throws std::invalid_argument on any broken invariant.
  void validate() const;
};

/// Result of a single auction. `assignment[j]` holds the seller taking slot j
/// (-1 when there are fewer sellers than slots); exposures and payments are
/// indexed by seller, with losers at exactly 0.
struct AuctionOutcome {
  std::vector<int> assignment;
  std::vector<double> exposures;
  std::vector<double> payments;
};

struct MetricsReport {
  double lw = 0.0;   // budget-capped welfare
  double ue = 0.0;   // total experience mass
  double obj = 0.0;  // lw + experience_weight * ue
  double rev = 0.0;  // total settled payments
  std::vector<double> spend;
  std::vector<double> sales_value;
  std::vector<double> exposure;
};

std::vector<double> rank_scores(std::span<const double> bids,
                                const Request& request,
                                double experience_weight);

/// Assigns slots to sellers in descending score order, lower seller index
/// winning ties. Payments are zeroed.
AuctionOutcome allocate(std::span<const double> scores, const SlotLayout& slots);

double liquid_welfare(const Dataset& dataset,
                      std::span<const AuctionOutcome> outcomes);
double user_experience(const Dataset& dataset,
                       std::span<const AuctionOutcome> outcomes);
double revenue(const Dataset& dataset, std::span<const AuctionOutcome> outcomes,
               bool truncate);
MetricsReport compute_metrics(const Dataset& dataset,
                              std::span<const AuctionOutcome> outcomes,
                              bool truncate);

// Shared arithmetic kernels. The per-request auction path and the vectorized
// equilibrium path must produce bit-identical doubles, so both funnel through
// these.
inline double uniform_bid_value(double factor, double inv_roi, double value) {
  return factor * inv_roi * value;
}
inline double rank_score_value(double bid, double experience_weight,
                               double experience) {
  return bid + experience_weight * experience;
}
inline double lpa_payment_value(double inv_roi, double value, double exposure) {
  return inv_roi * value * exposure;
}

}  // namespace lpasim
