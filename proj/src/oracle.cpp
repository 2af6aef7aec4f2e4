#include "lpasim/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "lpasim/accum.hpp"
#include "lpasim/equilibrium.hpp"
#include "lpasim/pacing.hpp"

namespace lpasim {

namespace {

void check_unit_vector(std::span<const double> v, std::size_t n,
                       const char* what) {
  if (v.size() != n) {
    throw std::invalid_argument(std::string(what) +
                                ": size does not match seller count");
  }
  for (double x : v) {
    if (!(x >= 0.0 && x <= 1.0)) {
      throw std::invalid_argument(std::string(what) +
                                  ": entries must lie in [0, 1]");
    }
  }
}

}  // namespace

double dual_value(std::span<const double> multipliers, const Dataset& dataset) {
  dataset.validate();
  const std::size_t n = dataset.sellers.size();
  check_unit_vector(multipliers, n, "multipliers");

  std::vector<double> inv_roi(n);
  for (std::size_t i = 0; i < n; ++i) {
    inv_roi[i] = 1.0 / dataset.sellers[i].roi_target;
  }

  const std::size_t filled =
      std::min(n, static_cast<std::size_t>(dataset.slots.slot_count()));
  std::vector<double> weights(n);
  CompensatedSum greedy_mass;
  for (const Request& q : dataset.requests) {
    for (std::size_t i = 0; i < n; ++i) {
      weights[i] =
          rank_score_value(uniform_bid_value(multipliers[i], inv_roi[i],
                                             q.values[i]),
                           dataset.experience_weight, q.experiences[i]);
    }
    // Weights are non-negative, so filling every slot greedily attains the
    // per-request maximum over feasible exposure vectors.
    std::partial_sort(weights.begin(),
                      weights.begin() + static_cast<std::ptrdiff_t>(filled),
                      weights.end(), std::greater<>());
    double request_mass = 0.0;
    for (std::size_t j = 0; j < filled; ++j) {
      request_mass += dataset.slots.exposure_rates[j] * weights[j];
    }
    greedy_mass.add(request_mass);
  }

  CompensatedSum slack;
  for (std::size_t i = 0; i < n; ++i) {
    slack.add((1.0 - multipliers[i]) *
              (dataset.sellers[i].budget /
               static_cast<double>(dataset.request_count())));
  }
  return greedy_mass.value() / static_cast<double>(dataset.request_count()) +
         slack.value();
}

double primal_value(std::span<const double> factors, const Dataset& dataset) {
  const std::vector<AuctionOutcome> outcomes =
      run_offline(dataset, factors, AuctionRule::lpa);
  const MetricsReport metrics =
      compute_metrics(dataset, outcomes, /*truncate=*/true);
  return metrics.obj / static_cast<double>(dataset.request_count());
}

double duality_gap(std::span<const double> factors, const Dataset& dataset) {
  return dual_value(factors, dataset) - primal_value(factors, dataset);
}

DualCertificate refine_certificate(std::span<const double> factors,
                                   const Dataset& dataset, double step,
                                   int passes) {
  if (!(step > 0.0)) {
    throw std::invalid_argument("refinement step must be positive");
  }
  DualCertificate cert;
  cert.multipliers.assign(factors.begin(), factors.end());
  cert.dual = dual_value(cert.multipliers, dataset);
  for (int pass = 0; pass < passes; ++pass) {
    bool improved = false;
    for (std::size_t i = 0; i < cert.multipliers.size(); ++i) {
      const double base = cert.multipliers[i];
      for (double candidate : {base - step, base + step}) {
        candidate = std::clamp(candidate, 0.0, 1.0);
        if (candidate == base) continue;
        cert.multipliers[i] = candidate;
        const double trial = dual_value(cert.multipliers, dataset);
        if (trial < cert.dual) {
          cert.dual = trial;
          improved = true;
        } else {
          cert.multipliers[i] = base;
        }
      }
    }
    if (!improved) break;
  }
  cert.primal = primal_value(factors, dataset);
  cert.gap = cert.dual - cert.primal;
  return cert;
}

double score_tie_rate(const Dataset& dataset,
                      std::span<const double> factors) {
  dataset.validate();
  const std::size_t n = dataset.sellers.size();
  check_unit_vector(factors, n, "factors");
  if (n < 2) return 0.0;

  std::size_t tied = 0;
  std::vector<double> scores(n);
  for (std::size_t t = 0; t < dataset.request_count(); ++t) {
    const std::vector<double> bids = uniform_bids(factors, dataset, t);
    const Request& q = dataset.requests[t];
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = rank_score_value(bids[i], dataset.experience_weight,
                                   q.experiences[i]);
    }
    std::sort(scores.begin(), scores.end());
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (scores[i] == scores[i + 1]) {
        ++tied;
        break;
      }
    }
  }
  return static_cast<double>(tied) /
         static_cast<double>(dataset.request_count());
}

bool MisreportGrid::has_feasible_improvement(double rel_tol) const {
  return max_feasible_improvement() > rel_tol;
}

double MisreportGrid::max_feasible_improvement() const {
  const double base = truthful().true_objective;
  double worst = 0.0;
  for (const MisreportCell& cell : cells) {
    if (!cell.feasible) continue;
    const double gain = cell.true_objective - base;
    if (gain > worst) worst = gain;
  }
  return base > 0.0 ? worst / base : worst;
}

MisreportGrid ic_probe(int seller, const Dataset& dataset,
                       std::span<const double> grid_factors, double epsilon,
                       double delta) {
  dataset.validate();
  if (seller < 0 || seller >= dataset.seller_count()) {
    throw std::invalid_argument("seller index out of range");
  }
  if (grid_factors.empty()) {
    throw std::invalid_argument("misreport grid needs at least one factor");
  }
  bool has_truthful = false;
  for (double f : grid_factors) {
    if (!std::isfinite(f) || f <= 0.0) {
      throw std::invalid_argument("misreport factors must be positive");
    }
    if (f == 1.0) has_truthful = true;
  }
  if (!has_truthful) {
    throw std::invalid_argument("misreport grid must contain the truthful "
                                "factor 1");
  }

  const std::size_t si = static_cast<std::size_t>(seller);
  const double true_budget = dataset.sellers[si].budget;
  const double true_roi = dataset.sellers[si].roi_target;

  MisreportGrid grid;
  grid.seller = seller;
  grid.grid_factors.assign(grid_factors.begin(), grid_factors.end());
  grid.cells.reserve(grid_factors.size() * grid_factors.size());

  Dataset reported = dataset;
  for (std::size_t bi = 0; bi < grid_factors.size(); ++bi) {
    for (std::size_t ri = 0; ri < grid_factors.size(); ++ri) {
      MisreportCell cell;
      cell.budget_factor = grid_factors[bi];
      cell.roi_factor = grid_factors[ri];
      cell.reported_budget = cell.budget_factor * true_budget;
      cell.reported_roi = cell.roi_factor * true_roi;
      reported.sellers[si].budget = cell.reported_budget;
      reported.sellers[si].roi_target = cell.reported_roi;

      const EquilibriumResult eq =
          compute_equilibrium(reported, epsilon, delta);
      const std::vector<AuctionOutcome> outcomes =
          run_offline(reported, eq.factors, AuctionRule::lpa);

      CompensatedSum sales, spend;
      for (std::size_t t = 0; t < outcomes.size(); ++t) {
        const double x = outcomes[t].exposures[si];
        if (x != 0.0) sales.add(dataset.requests[t].values[si] * x);
        const double p = outcomes[t].payments[si];
        if (p != 0.0) spend.add(p);
      }
      cell.sales = sales.value();
      cell.settled_payment = std::min(cell.reported_budget, spend.value());
      const double true_cap =
          std::min(true_budget, (1.0 / true_roi) * cell.sales);
      cell.true_objective = true_cap;
      cell.feasible = cell.settled_payment <=
                      true_cap + 1e-9 * std::max(1.0, std::abs(true_cap));

      if (cell.budget_factor == 1.0 && cell.roi_factor == 1.0) {
        grid.truthful_index = grid.cells.size();
      }
      grid.cells.push_back(cell);
    }
  }
  return grid;
}

std::span<const double> default_misreport_factors() {
  static constexpr std::array<double, 7> kFactors = {0.25, 0.5, 0.8, 1.0,
                                                     1.25, 2.0, 4.0};
  return kFactors;
}

}  // namespace lpasim
