#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lpasim/model.hpp"

namespace lpasim {

/// Lagrangian certificate for one pacing profile: the dual bound, the
/// realized per-request objective, and their gap. Weak duality keeps the gap
/// non-negative up to rounding; a near-zero gap certifies the allocation.
struct DualCertificate {
  std::vector<double> multipliers;
  double dual = 0.0;    // per request
  double primal = 0.0;  // per request
  double gap = 0.0;     // dual - primal
};

struct MisreportCell {
  double budget_factor = 1.0;
  double roi_factor = 1.0;
  double reported_budget = 0.0;
  double reported_roi = 0.0;
  double sales = 0.0;            // exposure-weighted true value obtained
  double settled_payment = 0.0;  // truncated at the reported budget
  double true_objective = 0.0;   // min(true budget, sales / true roi)
  bool feasible = true;          // settled payment within the true caps
};

/// One seller's misreport sweep over a multiplicative (budget, roi) grid.
struct MisreportGrid {
  int seller = 0;
  std::vector<double> grid_factors;
  std::vector<MisreportCell> cells;  // row-major: budget factor, then roi
  std::size_t truthful_index = 0;

  const MisreportCell& truthful() const { return cells[truthful_index]; }

  /// True if some feasible cell beats the truthful objective by more than
  /// rel_tol of its value.
  bool has_feasible_improvement(double rel_tol) const;

  /// Largest feasible improvement over the truthful objective, relative to
  /// the truthful value (0 when nothing improves).
  double max_feasible_improvement() const;
};

/// Upper bound on the achievable per-request objective: per request, slots go
/// greedily to the highest multiplier-weighted values, plus the multiplier
/// complement of the budget rates.
double dual_value(std::span<const double> multipliers, const Dataset& dataset);

/// Realized per-request objective of a static pacing profile under the
/// liquid-payment rule.
double primal_value(std::span<const double> factors, const Dataset& dataset);

/// dual_value(factors) - primal_value(factors).
double duality_gap(std::span<const double> factors, const Dataset& dataset);

/// Tightens the certificate by coordinate-descent over the multipliers in
/// +-step moves, keeping the smallest dual bound found.
DualCertificate refine_certificate(std::span<const double> factors,
                                   const Dataset& dataset, double step,
                                   int passes = 1);

/// Fraction of requests with an exact rank-score tie under the profile.
double score_tie_rate(const Dataset& dataset, std::span<const double> factors);

/// Re-solves the equilibrium for every (budget, roi) misreport on the grid
/// and scores each cell by the seller's true objective; cells whose settled
/// payment violates the true budget or ROI cap are flagged infeasible.
MisreportGrid ic_probe(int seller, const Dataset& dataset,
                       std::span<const double> grid_factors, double epsilon,
                       double delta);

std::span<const double> default_misreport_factors();

}  // namespace lpasim
