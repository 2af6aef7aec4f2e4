#include "lpasim/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "lpasim/accum.hpp"

namespace lpasim {

void SlotLayout::validate() const {
  if (exposure_rates.empty()) {
    throw std::invalid_argument("slot layout needs at least one slot");
  }
  double prev = 1.0;
  for (double beta : exposure_rates) {
    if (!std::isfinite(beta) || beta <= 0.0) {
      throw std::invalid_argument("exposure rates must be positive and finite");
    }
    if (beta > prev) {
      throw std::invalid_argument(
          "exposure rates must be decreasing and at most 1");
    }
    prev = beta;
  }
}

void Dataset::validate() const {
  if (sellers.empty()) {
    throw std::invalid_argument("dataset needs at least one seller");
  }
  if (requests.empty()) {
    throw std::invalid_argument("dataset needs at least one request");
  }
  slots.validate();
  if (!std::isfinite(experience_weight) || experience_weight < 0.0) {
    throw std::invalid_argument("experience weight must be non-negative");
  }
  const int n = seller_count();
  for (int i = 0; i < n; ++i) {
    const SellerProfile& s = sellers[static_cast<std::size_t>(i)];
    if (s.id != i) {
      throw std::invalid_argument("seller ids must equal their index");
    }
    if (!std::isfinite(s.budget) || s.budget <= 0.0) {
      throw std::invalid_argument("seller budget must be positive");
    }
    if (!std::isfinite(s.roi_target) || s.roi_target <= 0.0) {
      throw std::invalid_argument("seller ROI target must be positive");
    }
  }
  for (const Request& q : requests) {
    if (q.values.size() != static_cast<std::size_t>(n) ||
        q.experiences.size() != static_cast<std::size_t>(n)) {
      throw std::invalid_argument("request '" + q.id +
                                  "': vector length does not match the "
                                  "seller count");
    }
    for (double v : q.values) {
      if (!std::isfinite(v) || v < 0.0) {
        throw std::invalid_argument("request '" + q.id +
                                    "': values must be finite and >= 0");
      }
    }
    for (double e : q.experiences) {
      if (!std::isfinite(e) || e < 0.0) {
        throw std::invalid_argument("request '" + q.id +
                                    "': experiences must be finite and >= 0");
      }
    }
  }
}

std::vector<double> rank_scores(std::span<const double> bids,
                                const Request& request,
                                double experience_weight) {
  const std::size_t n = request.values.size();
  if (bids.size() != n || request.experiences.size() != n) {
    throw std::invalid_argument("rank_scores: bid count does not match the "
                                "request's seller count");
  }
  std::vector<double> scores(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(bids[i]) || bids[i] < 0.0) {
      throw std::invalid_argument("rank_scores: bids must be finite and >= 0");
    }
    scores[i] =
        rank_score_value(bids[i], experience_weight, request.experiences[i]);
  }
  return scores;
}

AuctionOutcome allocate(std::span<const double> scores,
                        const SlotLayout& slots) {
  const int n = static_cast<int>(scores.size());
  for (double s : scores) {
    if (!std::isfinite(s)) {
      throw std::invalid_argument("allocate: scores must be finite");
    }
  }
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (scores[static_cast<std::size_t>(a)] !=
        scores[static_cast<std::size_t>(b)]) {
      return scores[static_cast<std::size_t>(a)] >
             scores[static_cast<std::size_t>(b)];
    }
    return a < b;  // ties go to the lower seller index
  });

  const int m = slots.slot_count();
  const int filled = std::min(n, m);
  AuctionOutcome out;
  out.assignment.assign(static_cast<std::size_t>(m), -1);
  out.exposures.assign(static_cast<std::size_t>(n), 0.0);
  out.payments.assign(static_cast<std::size_t>(n), 0.0);
  for (int j = 0; j < filled; ++j) {
    const int winner = order[static_cast<std::size_t>(j)];
    out.assignment[static_cast<std::size_t>(j)] = winner;
    out.exposures[static_cast<std::size_t>(winner)] =
        slots.exposure_rates[static_cast<std::size_t>(j)];
  }
  return out;
}

namespace {

struct Totals {
  std::vector<double> spend_raw;
  std::vector<double> sales;
  std::vector<double> exposure;
  std::vector<double> experience;
};

Totals accumulate_totals(const Dataset& dataset,
                         std::span<const AuctionOutcome> outcomes) {
  if (outcomes.size() != dataset.request_count()) {
    throw std::invalid_argument("need exactly one outcome per request");
  }
  const std::size_t n = dataset.sellers.size();
  std::vector<CompensatedSum> spend(n), sales(n), expo(n), ue(n);
  for (std::size_t t = 0; t < outcomes.size(); ++t) {
    const AuctionOutcome& out = outcomes[t];
    const Request& q = dataset.requests[t];
    if (out.exposures.size() != n || out.payments.size() != n) {
      throw std::invalid_argument("outcome " + std::to_string(t) +
                                  " does not match the seller count");
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double x = out.exposures[i];
      if (x != 0.0) {
        sales[i].add(q.values[i] * x);
        expo[i].add(x);
        ue[i].add(x * q.experiences[i]);
      }
      if (out.payments[i] != 0.0) {
        spend[i].add(out.payments[i]);
      }
    }
  }
  Totals totals;
  totals.spend_raw.resize(n);
  totals.sales.resize(n);
  totals.exposure.resize(n);
  totals.experience.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    totals.spend_raw[i] = spend[i].value();
    totals.sales[i] = sales[i].value();
    totals.exposure[i] = expo[i].value();
    totals.experience[i] = ue[i].value();
  }
  return totals;
}

double lw_from(const Dataset& dataset, const Totals& totals) {
  CompensatedSum lw;
  for (std::size_t i = 0; i < dataset.sellers.size(); ++i) {
    const SellerProfile& s = dataset.sellers[i];
    lw.add(std::min(s.budget, (1.0 / s.roi_target) * totals.sales[i]));
  }
  return lw.value();
}

double ue_from(const Totals& totals) {
  CompensatedSum ue;
  for (double x : totals.experience) ue.add(x);
  return ue.value();
}

double rev_from(const Dataset& dataset, const Totals& totals, bool truncate) {
  CompensatedSum rev;
  for (std::size_t i = 0; i < dataset.sellers.size(); ++i) {
    const double spent = totals.spend_raw[i];
    rev.add(truncate ? std::min(dataset.sellers[i].budget, spent) : spent);
  }
  return rev.value();
}

}  // namespace

double liquid_welfare(const Dataset& dataset,
                      std::span<const AuctionOutcome> outcomes) {
  return lw_from(dataset, accumulate_totals(dataset, outcomes));
}

double user_experience(const Dataset& dataset,
                       std::span<const AuctionOutcome> outcomes) {
  return ue_from(accumulate_totals(dataset, outcomes));
}

double revenue(const Dataset& dataset, std::span<const AuctionOutcome> outcomes,
               bool truncate) {
  return rev_from(dataset, accumulate_totals(dataset, outcomes), truncate);
}

MetricsReport compute_metrics(const Dataset& dataset,
                              std::span<const AuctionOutcome> outcomes,
                              bool truncate) {
  const Totals totals = accumulate_totals(dataset, outcomes);
  MetricsReport report;
  report.lw = lw_from(dataset, totals);
  report.ue = ue_from(totals);
  report.obj = report.lw + dataset.experience_weight * report.ue;
  report.rev = rev_from(dataset, totals, truncate);
  const std::size_t n = dataset.sellers.size();
  report.spend.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    report.spend[i] = truncate
                          ? std::min(dataset.sellers[i].budget,
                                     totals.spend_raw[i])
                          : totals.spend_raw[i];
  }
  report.sales_value = totals.sales;
  report.exposure = totals.exposure;
  return report;
}

}  // namespace lpasim
