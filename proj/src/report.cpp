#include "lpasim/report.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <sstream>

namespace lpasim {

namespace {

double pct_of(double value, double base) {
  if (base != 0.0) return 100.0 * (value / base);
  return value == 0.0 ? 100.0 : std::numeric_limits<double>::infinity();
}

int rule_order(std::string_view name) {
  for (std::size_t k = 0; k < kAllRules.size(); ++k) {
    if (name == rule_name(kAllRules[k])) return static_cast<int>(k);
  }
  return static_cast<int>(kAllRules.size());
}

}  // namespace

std::string format_double(double value) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), res.ptr);
}

ComparisonReport run_comparison(const Dataset& dataset,
                                std::span<const AuctionRule> rules,
                                double learning_rate, double epsilon,
                                double delta, bool truncate) {
  ComparisonReport report;
  report.experience_weight = dataset.experience_weight;
  report.learning_rate = learning_rate;
  report.epsilon = epsilon;
  report.delta = delta;
  report.truncated = truncate;

  report.equilibrium = compute_equilibrium(dataset, epsilon, delta);
  const std::vector<AuctionOutcome> offline_outcomes =
      run_offline(dataset, report.equilibrium.factors, AuctionRule::lpa);

  ComparisonRow baseline;
  baseline.auction = "lpa_offline";
  baseline.metrics = compute_metrics(dataset, offline_outcomes, truncate);
  report.rows.push_back(baseline);

  for (AuctionRule rule : kAllRules) {
    if (std::find(rules.begin(), rules.end(), rule) == rules.end()) continue;
    const SimulationTrace trace =
        simulate_online(dataset, rule, learning_rate);
    ComparisonRow row;
    row.auction = std::string(rule_name(rule));
    row.metrics = truncate ? trace.metrics
                           : compute_metrics(dataset, trace.outcomes, false);
    report.rows.push_back(std::move(row));
  }

  const MetricsReport& base = report.rows.front().metrics;
  const double kappa = dataset.experience_weight;
  for (ComparisonRow& row : report.rows) {
    row.lw_pct = pct_of(row.metrics.lw, base.lw);
    row.kappa_ue_pct = pct_of(kappa * row.metrics.ue, kappa * base.ue);
    row.obj_pct = pct_of(row.metrics.obj, base.obj);
    row.rev_pct = pct_of(row.metrics.rev, base.rev);
  }
  return report;
}

std::vector<SweepRow> run_sweep(const Dataset& dataset,
                                std::span<const double> kappas,
                                std::span<const AuctionRule> rules,
                                double learning_rate) {
  if (kappas.empty()) {
    throw std::invalid_argument("sweep needs a non-empty kappa list");
  }
  std::vector<SweepRow> rows;
  Dataset setting = dataset;
  for (AuctionRule rule : kAllRules) {
    if (std::find(rules.begin(), rules.end(), rule) == rules.end()) continue;
    for (double kappa : kappas) {
      setting.experience_weight = kappa;
      const SimulationTrace trace =
          simulate_online(setting, rule, learning_rate);
      rows.push_back({std::string(rule_name(rule)), kappa, trace.metrics.lw,
                      trace.metrics.ue});
    }
  }
  std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    const int ra = rule_order(a.rule);
    const int rb = rule_order(b.rule);
    if (ra != rb) return ra < rb;
    return a.kappa < b.kappa;
  });
  return rows;
}

CertificationReport run_certification(const Dataset& dataset, double epsilon,
                                      double delta, double gap_tolerance) {
  CertificationReport report;
  report.gap_tolerance = gap_tolerance;
  report.equilibrium = compute_equilibrium(dataset, epsilon, delta);
  report.verification =
      verify_epsilon_equilibrium(report.equilibrium.factors, epsilon, dataset);
  report.primal = primal_value(report.equilibrium.factors, dataset);
  report.gap =
      dual_value(report.equilibrium.factors, dataset) - report.primal;
  report.gap_relative =
      report.primal != 0.0 ? report.gap / std::abs(report.primal)
                           : std::numeric_limits<double>::infinity();
  report.refined =
      refine_certificate(report.equilibrium.factors, dataset, epsilon);
  report.tie_rate = score_tie_rate(dataset, report.equilibrium.factors);

  const double refined_rel =
      report.primal != 0.0 ? report.refined.gap / std::abs(report.primal)
                           : std::numeric_limits<double>::infinity();
  const bool gap_ok = std::min(report.gap_relative, refined_rel) <=
                      gap_tolerance;
  if (report.verification.pass && gap_ok) {
    report.status = "pass";
  } else if (report.verification.pass && report.tie_rate > 0.01) {
    // Atom-heavy data admits a real gap even at equilibrium.
    report.status = "warn";
  } else {
    report.status = "fail";
  }
  return report;
}

namespace {

nlohmann::json metrics_to_json(const MetricsReport& m, double kappa) {
  return {{"lw", m.lw},
          {"kappa_ue", kappa * m.ue},
          {"ue", m.ue},
          {"obj", m.obj},
          {"rev", m.rev},
          {"per_seller",
           {{"spend", m.spend},
            {"sales_value", m.sales_value},
            {"exposure", m.exposure}}}};
}

}  // namespace

nlohmann::json comparison_to_json(const ComparisonReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const ComparisonRow& row : report.rows) {
    nlohmann::json j = metrics_to_json(row.metrics, report.experience_weight);
    j["auction"] = row.auction;
    j["pct"] = {{"lw", row.lw_pct},
                {"kappa_ue", row.kappa_ue_pct},
                {"obj", row.obj_pct},
                {"rev", row.rev_pct}};
    rows.push_back(std::move(j));
  }
  return {{"baseline", "lpa_offline"},
          {"kappa", report.experience_weight},
          {"eta", report.learning_rate},
          {"epsilon", report.epsilon},
          {"delta", report.delta},
          {"truncated", report.truncated},
          {"equilibrium",
           {{"factors", report.equilibrium.factors},
            {"iterations", report.equilibrium.iterations},
            {"expected_payments", report.equilibrium.expected_payments}}},
          {"rows", rows}};
}

std::string comparison_to_csv(const ComparisonReport& report) {
  std::ostringstream out;
  out << "auction,lw,kappa_ue,obj,rev,lw_pct,kappa_ue_pct,obj_pct,rev_pct\n";
  for (const ComparisonRow& row : report.rows) {
    out << row.auction << ',' << format_double(row.metrics.lw) << ','
        << format_double(report.experience_weight * row.metrics.ue) << ','
        << format_double(row.metrics.obj) << ','
        << format_double(row.metrics.rev) << ',' << format_double(row.lw_pct)
        << ',' << format_double(row.kappa_ue_pct) << ','
        << format_double(row.obj_pct) << ',' << format_double(row.rev_pct)
        << '\n';
  }
  return out.str();
}

std::string sweep_to_csv(std::span<const SweepRow> rows) {
  std::ostringstream out;
  out << "rule,kappa,lw,ue\n";
  for (const SweepRow& row : rows) {
    out << row.rule << ',' << format_double(row.kappa) << ','
        << format_double(row.lw) << ',' << format_double(row.ue) << '\n';
  }
  return out.str();
}

nlohmann::json sweep_to_json(std::span<const SweepRow> rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const SweepRow& row : rows) {
    out.push_back({{"rule", row.rule},
                   {"kappa", row.kappa},
                   {"lw", row.lw},
                   {"ue", row.ue}});
  }
  return out;
}

nlohmann::json certification_to_json(const CertificationReport& report) {
  nlohmann::json violations = nlohmann::json::array();
  for (const VerifyReport::Violation& v : report.verification.violations) {
    violations.push_back({{"seller", v.seller},
                          {"condition", v.condition},
                          {"margin", v.margin}});
  }
  return {{"status", report.status},
          {"factors", report.equilibrium.factors},
          {"iterations", report.equilibrium.iterations},
          {"expected_payments", report.equilibrium.expected_payments},
          {"epsilon", report.equilibrium.epsilon},
          {"delta", report.equilibrium.delta},
          {"primal", report.primal},
          {"gap", report.gap},
          {"gap_relative", report.gap_relative},
          {"gap_tolerance", report.gap_tolerance},
          {"refined",
           {{"multipliers", report.refined.multipliers},
            {"dual", report.refined.dual},
            {"gap", report.refined.gap}}},
          {"tie_rate", report.tie_rate},
          {"verifier", {{"pass", report.verification.pass},
                        {"violations", violations}}}};
}

nlohmann::json misreport_grid_to_json(const MisreportGrid& grid,
                                      double rel_tol) {
  nlohmann::json cells = nlohmann::json::array();
  for (const MisreportCell& cell : grid.cells) {
    cells.push_back({{"budget_factor", cell.budget_factor},
                     {"roi_factor", cell.roi_factor},
                     {"reported_budget", cell.reported_budget},
                     {"reported_roi", cell.reported_roi},
                     {"sales", cell.sales},
                     {"settled_payment", cell.settled_payment},
                     {"true_objective", cell.true_objective},
                     {"feasible", cell.feasible}});
  }
  return {{"seller", grid.seller},
          {"grid_factors", grid.grid_factors},
          {"truthful_objective", grid.truthful().true_objective},
          {"max_feasible_improvement", grid.max_feasible_improvement()},
          {"tolerance", rel_tol},
          {"pass", !grid.has_feasible_improvement(rel_tol)},
          {"cells", cells}};
}

}  // namespace lpasim
