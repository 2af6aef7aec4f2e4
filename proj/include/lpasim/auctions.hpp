#pragma once

#include <array>
#include <span>
#include <string_view>

#include "lpasim/model.hpp"

namespace lpasim {

/// The four payment rules. All share the rank-score allocation; they differ
/// only in what a winner is charged.
enum class AuctionRule { lpa, gfp, gsp, vcg };

inline constexpr std::array<AuctionRule, 4> kAllRules = {
    AuctionRule::lpa, AuctionRule::gfp, AuctionRule::gsp, AuctionRule::vcg};

std::string_view rule_name(AuctionRule rule);
AuctionRule rule_from_name(std::string_view name);

/// Runs one auction: rank-score allocation plus rule-specific payments.
AuctionOutcome run_auction(const Request& request, std::span<const double> bids,
                           std::span<const SellerProfile> sellers,
                           const SlotLayout& slots, double experience_weight,
                           AuctionRule rule);

/// First-price charge for the winner of the given 1-based rank.
double gfp_payment(int rank, double bid, const SlotLayout& slots);

/// Next-score charge with the winner's own experience boost subtracted and
/// the price clamped at zero.
double gsp_payment(int rank, std::span<const double> scores_desc,
                   double experience, double experience_weight,
                   const SlotLayout& slots);

/// Position-auction externality charge; coincides with gsp_payment on the
/// last slot and with the textbook rule when the experience weight is zero.
double vcg_payment(int rank, std::span<const double> scores_desc,
                   double experience, double experience_weight,
                   const SlotLayout& slots);

}  // namespace lpasim
