#include "lpasim/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "lpasim/accum.hpp"
#include "lpasim/pacing.hpp"

namespace lpasim {

namespace {

// Vectorized evaluation of a single seller's payment curve under the
// liquid-payment rule. Competitor scores are kept current per request so a
// probe of seller i at a trial factor costs one pass over the requests. The
// arithmetic mirrors the per-request auction path exactly (same kernels,
// same accumulation order), so probes agree bit-for-bit with
// expected_payment.
class LpaProbe {
 public:
  explicit LpaProbe(const Dataset& dataset)
      : n_(dataset.sellers.size()),
        horizon_(dataset.request_count()),
        slot_count_(static_cast<std::size_t>(dataset.slots.slot_count())),
        beta_(dataset.slots.exposure_rates),
        inv_roi_(n_),
        values_(n_ * horizon_),
        boost_(n_ * horizon_),
        scores_(n_ * horizon_) {
    for (std::size_t i = 0; i < n_; ++i) {
      inv_roi_[i] = 1.0 / dataset.sellers[i].roi_target;
    }
    for (std::size_t t = 0; t < horizon_; ++t) {
      const Request& q = dataset.requests[t];
      for (std::size_t i = 0; i < n_; ++i) {
        values_[t * n_ + i] = q.values[i];
        boost_[t * n_ + i] = dataset.experience_weight * q.experiences[i];
      }
    }
  }

  void set_factor(std::size_t i, double factor) {
    for (std::size_t t = 0; t < horizon_; ++t) {
      const std::size_t k = t * n_ + i;
      scores_[k] =
          uniform_bid_value(factor, inv_roi_[i], values_[k]) + boost_[k];
    }
  }

  void set_profile(std::span<const double> factors) {
    for (std::size_t i = 0; i < n_; ++i) set_factor(i, factors[i]);
  }

  // E[p_i] with seller i at the trial factor and everyone else at the
  // currently loaded profile.
  double probe(std::size_t i, double factor) const {
    CompensatedSum acc;
    for (std::size_t t = 0; t < horizon_; ++t) {
      const std::size_t base = t * n_;
      const double value = values_[base + i];
      const double score =
          uniform_bid_value(factor, inv_roi_[i], value) + boost_[base + i];
      std::size_t beaten_by = 0;
      for (std::size_t j = 0; j < n_; ++j) {
        if (j == i) continue;
        const double other = scores_[base + j];
        beaten_by += other > score || (other == score && j < i);
      }
      if (beaten_by < slot_count_) {
        acc.add(lpa_payment_value(inv_roi_[i], value, beta_[beaten_by]));
      }
    }
    return acc.value() / static_cast<double>(horizon_);
  }

 private:
  std::size_t n_;
  std::size_t horizon_;
  std::size_t slot_count_;
  std::vector<double> beta_;
  std::vector<double> inv_roi_;
  std::vector<double> values_;
  std::vector<double> boost_;   // experience_weight * e
  std::vector<double> scores_;  // request-major, refreshed per seller
};

double bisect_min_pacing(const LpaProbe& probe, std::size_t seller,
                         double target, double hi, double delta) {
  if (probe.probe(seller, 0.0) >= target) return 0.0;
  if (probe.probe(seller, hi) < target) {
    throw std::logic_error(
        "min_pacing_to_spend: target unreachable at the upper bound (loop "
        "guard broken)");
  }
  double lo = 0.0;
  while (hi - lo > delta) {
    const double mid = 0.5 * (lo + hi);
    if (probe.probe(seller, mid) >= target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

void check_factors(std::span<const double> factors, std::size_t n) {
  if (factors.size() != n) {
    throw std::invalid_argument("factor count does not match seller count");
  }
  for (double a : factors) {
    if (!(a >= 0.0 && a <= 1.0)) {
      throw std::invalid_argument("pacing factors must lie in [0, 1]");
    }
  }
}

void check_tolerances(double epsilon, double delta) {
  if (!(epsilon > 0.0 && epsilon < 0.5)) {
    throw std::invalid_argument("epsilon must lie in (0, 0.5)");
  }
  if (!(delta > 0.0 && delta <= epsilon / 10.0)) {
    throw std::invalid_argument("delta must lie in (0, epsilon/10]");
  }
}

}  // namespace

double expected_payment(int seller, std::span<const double> factors,
                        const Dataset& dataset, AuctionRule rule) {
  dataset.validate();
  const std::size_t n = dataset.sellers.size();
  check_factors(factors, n);
  if (seller < 0 || static_cast<std::size_t>(seller) >= n) {
    throw std::invalid_argument("seller index out of range");
  }
  CompensatedSum acc;
  for (std::size_t t = 0; t < dataset.request_count(); ++t) {
    const std::vector<double> bids = uniform_bids(factors, dataset, t);
    const AuctionOutcome out =
        run_auction(dataset.requests[t], bids, dataset.sellers, dataset.slots,
                    dataset.experience_weight, rule);
    acc.add(out.payments[static_cast<std::size_t>(seller)]);
  }
  return acc.value() / static_cast<double>(dataset.request_count());
}

double min_pacing_to_spend(int seller, std::span<const double> factors,
                           double target, double hi, const Dataset& dataset,
                           double delta) {
  dataset.validate();
  const std::size_t n = dataset.sellers.size();
  check_factors(factors, n);
  if (seller < 0 || static_cast<std::size_t>(seller) >= n) {
    throw std::invalid_argument("seller index out of range");
  }
  if (!(hi >= 0.0 && hi <= 1.0)) {
    throw std::invalid_argument("upper bound must lie in [0, 1]");
  }
  if (!(delta > 0.0)) {
    throw std::invalid_argument("delta must be positive");
  }
  LpaProbe probe(dataset);
  probe.set_profile(factors);
  return bisect_min_pacing(probe, static_cast<std::size_t>(seller), target, hi,
                           delta);
}

EquilibriumResult compute_equilibrium(const Dataset& dataset, double epsilon,
                                      double delta,
                                      std::span<const int> scan_order) {
  dataset.validate();
  check_tolerances(epsilon, delta);
  const std::size_t n = dataset.sellers.size();

  std::vector<int> order(n);
  if (scan_order.empty()) {
    std::iota(order.begin(), order.end(), 0);
  } else {
    if (scan_order.size() != n) {
      throw std::invalid_argument("scan order must list every seller once");
    }
    order.assign(scan_order.begin(), scan_order.end());
    std::vector<int> sorted(order);
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < n; ++i) {
      if (sorted[i] != static_cast<int>(i)) {
        throw std::invalid_argument("scan order must be a permutation of the "
                                    "seller indices");
      }
    }
  }

  std::vector<double> targets(n);
  for (std::size_t i = 0; i < n; ++i) {
    targets[i] = dataset.sellers[i].budget /
                 static_cast<double>(dataset.request_count());
  }

  LpaProbe probe(dataset);
  std::vector<double> factors(n, 1.0);
  probe.set_profile(factors);

  EquilibriumResult result;
  result.epsilon = epsilon;
  result.delta = delta;
  const int max_iterations =
      static_cast<int>(std::ceil(static_cast<double>(n) / epsilon)) +
      static_cast<int>(n);

  for (;;) {
    int updating = -1;
    for (std::size_t k = 0; k < n; ++k) {
      const int i = order[k];
      const std::size_t si = static_cast<std::size_t>(i);
      if (factors[si] > epsilon &&
          probe.probe(si, factors[si] - epsilon) > targets[si]) {
        updating = i;
        break;
      }
    }
    if (updating < 0) break;

    const std::size_t si = static_cast<std::size_t>(updating);
    const double next =
        bisect_min_pacing(probe, si, targets[si], factors[si], delta);
    result.updates.push_back({updating, factors[si], next});
    factors[si] = next;
    probe.set_factor(si, next);
    if (++result.iterations > max_iterations) {
      throw std::logic_error(
          "compute_equilibrium: iteration bound exceeded; payment "
          "monotonicity is likely violated");
    }
  }

  result.factors = factors;
  result.expected_payments.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    result.expected_payments[i] =
        expected_payment(static_cast<int>(i), factors, dataset,
                         AuctionRule::lpa);
  }
  const VerifyReport check =
      verify_epsilon_equilibrium(factors, epsilon, dataset);
  if (!check.pass) {
    throw std::logic_error(
        "compute_equilibrium: output rejected by the equilibrium verifier");
  }
  return result;
}

VerifyReport verify_epsilon_equilibrium(std::span<const double> factors,
                                        double epsilon,
                                        const Dataset& dataset) {
  dataset.validate();
  const std::size_t n = dataset.sellers.size();
  check_factors(factors, n);
  if (!(epsilon > 0.0 && epsilon < 0.5)) {
    throw std::invalid_argument("epsilon must lie in (0, 0.5)");
  }

  VerifyReport report;
  std::vector<double> trial(factors.begin(), factors.end());
  for (std::size_t i = 0; i < n; ++i) {
    const double target = dataset.sellers[i].budget /
                          static_cast<double>(dataset.request_count());
    if (factors[i] > epsilon) {
      trial[i] = factors[i] - epsilon;
      const double paid =
          expected_payment(static_cast<int>(i), trial, dataset,
                           AuctionRule::lpa);
      trial[i] = factors[i];
      if (paid > target) {
        report.violations.push_back({static_cast<int>(i), 1, paid - target});
      }
    }
    if (factors[i] < 1.0 - epsilon) {
      trial[i] = factors[i] + epsilon;
      const double paid =
          expected_payment(static_cast<int>(i), trial, dataset,
                           AuctionRule::lpa);
      trial[i] = factors[i];
      if (paid < target) {
        report.violations.push_back({static_cast<int>(i), 2, target - paid});
      }
    }
  }
  report.pass = report.violations.empty();
  return report;
}

}  // namespace lpasim
