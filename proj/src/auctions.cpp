#include "lpasim/auctions.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

namespace lpasim {

std::string_view rule_name(AuctionRule rule) {
  switch (rule) {
    case AuctionRule::lpa: return "lpa";
    case AuctionRule::gfp: return "gfp";
    case AuctionRule::gsp: return "gsp";
    case AuctionRule::vcg: return "vcg";
  }
  throw std::invalid_argument("unknown auction rule");
}

AuctionRule rule_from_name(std::string_view name) {
  for (AuctionRule rule : kAllRules) {
    if (name == rule_name(rule)) return rule;
  }
  throw std::invalid_argument("unknown auction rule '" + std::string(name) +
                              "' (expected lpa, gfp, gsp or vcg)");
}

namespace {

void check_rank(int rank, const SlotLayout& slots) {
  if (rank < 1 || rank > slots.slot_count()) {
    throw std::invalid_argument("winner rank " + std::to_string(rank) +
                                " is outside the slot range");
  }
}

// (rank+1)-th highest score, 0 when there is no such bidder.
double next_score(int rank, std::span<const double> scores_desc) {
  return static_cast<std::size_t>(rank) < scores_desc.size()
             ? scores_desc[static_cast<std::size_t>(rank)]
             : 0.0;
}

}  // namespace

double gfp_payment(int rank, double bid, const SlotLayout& slots) {
  check_rank(rank, slots);
  return slots.exposure_at_rank(rank) * bid;
}

double gsp_payment(int rank, std::span<const double> scores_desc,
                   double experience, double experience_weight,
                   const SlotLayout& slots) {
  check_rank(rank, slots);
  const double boost = experience_weight * experience;
  return slots.exposure_at_rank(rank) *
         std::max(0.0, next_score(rank, scores_desc) - boost);
}

double vcg_payment(int rank, std::span<const double> scores_desc,
                   double experience, double experience_weight,
                   const SlotLayout& slots) {
  check_rank(rank, slots);
  const double boost = experience_weight * experience;
  double total = 0.0;
  for (int k = rank; k <= slots.slot_count(); ++k) {
    const double step =
        slots.exposure_at_rank(k) - slots.exposure_at_rank(k + 1);
    total += step * std::max(0.0, next_score(k, scores_desc) - boost);
  }
  return total;
}

AuctionOutcome run_auction(const Request& request, std::span<const double> bids,
                           std::span<const SellerProfile> sellers,
                           const SlotLayout& slots, double experience_weight,
                           AuctionRule rule) {
  if (sellers.size() != bids.size()) {
    throw std::invalid_argument("run_auction: bid and seller counts differ");
  }
  const std::vector<double> scores =
      rank_scores(bids, request, experience_weight);
  AuctionOutcome out = allocate(scores, slots);

  std::vector<double> sorted(scores);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());

  const int filled =
      std::min(static_cast<int>(bids.size()), slots.slot_count());
  for (int j = 0; j < filled; ++j) {
    const int i = out.assignment[static_cast<std::size_t>(j)];
    const int rank = j + 1;
    double payment = 0.0;
    switch (rule) {
      case AuctionRule::lpa:
        payment = lpa_payment_value(
            1.0 / sellers[static_cast<std::size_t>(i)].roi_target,
            request.values[static_cast<std::size_t>(i)],
            out.exposures[static_cast<std::size_t>(i)]);
        break;
      case AuctionRule::gfp:
        payment = gfp_payment(rank, bids[static_cast<std::size_t>(i)], slots);
        break;
      case AuctionRule::gsp:
        payment = gsp_payment(
            rank, sorted, request.experiences[static_cast<std::size_t>(i)],
            experience_weight, slots);
        break;
      case AuctionRule::vcg:
        payment = vcg_payment(
            rank, sorted, request.experiences[static_cast<std::size_t>(i)],
            experience_weight, slots);
        break;
    }
    out.payments[static_cast<std::size_t>(i)] = payment;
  }
  return out;
}

}  // namespace lpasim
