#pragma once

#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "lpasim/equilibrium.hpp"
#include "lpasim/oracle.hpp"
#include "lpasim/pacing.hpp"

namespace lpasim {

struct ComparisonRow {
  std::string auction;  // "lpa_offline", "lpa", "gfp", "gsp", "vcg"
  MetricsReport metrics;
  double lw_pct = 0.0;
  double kappa_ue_pct = 0.0;
  double obj_pct = 0.0;
  double rev_pct = 0.0;
};

/// Offline-equilibrium row first, at 100% in every column; online rows are
/// expressed relative to it.
struct ComparisonReport {
  double experience_weight = 0.0;
  double learning_rate = 0.0;
  double epsilon = 0.0;
  double delta = 0.0;
  bool truncated = true;
  EquilibriumResult equilibrium;
  std::vector<ComparisonRow> rows;
};

ComparisonReport run_comparison(const Dataset& dataset,
                                std::span<const AuctionRule> rules,
                                double learning_rate, double epsilon,
                                double delta, bool truncate);

struct SweepRow {
  std::string rule;
  double kappa = 0.0;
  double lw = 0.0;
  double ue = 0.0;
};

/// One online run per (rule, kappa); rows come back sorted by rule then
/// kappa regardless of execution order.
std::vector<SweepRow> run_sweep(const Dataset& dataset,
                                std::span<const double> kappas,
                                std::span<const AuctionRule> rules,
                                double learning_rate);

struct CertificationReport {
  EquilibriumResult equilibrium;
  VerifyReport verification;
  double primal = 0.0;
  double gap = 0.0;          // plain gap at the equilibrium profile
  double gap_relative = 0.0;
  DualCertificate refined;   // locally refined multipliers
  double tie_rate = 0.0;
  double gap_tolerance = 0.0;
  std::string status;  // "pass", "warn" (atom-heavy data), "fail"
};

CertificationReport run_certification(const Dataset& dataset, double epsilon,
                                      double delta, double gap_tolerance);

nlohmann::json comparison_to_json(const ComparisonReport& report);
std::string comparison_to_csv(const ComparisonReport& report);
std::string sweep_to_csv(std::span<const SweepRow> rows);
nlohmann::json sweep_to_json(std::span<const SweepRow> rows);
nlohmann::json certification_to_json(const CertificationReport& report);
nlohmann::json misreport_grid_to_json(const MisreportGrid& grid,
                                      double rel_tol);

/// Shortest exact decimal form, locale-independent.
std::string format_double(double value);

}  // namespace lpasim
