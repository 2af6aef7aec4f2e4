#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "lpasim/data.hpp"
#include "lpasim/equilibrium.hpp"
#include "lpasim/oracle.hpp"
#include "lpasim/pacing.hpp"
#include "lpasim/report.hpp"

namespace py = pybind11;
using namespace lpasim;

#ifndef LPASIM_VERSION
#define LPASIM_VERSION "0.0.0"
#endif

PYBIND11_MODULE(_lpasim, m) {
  m.doc() = "Liquid-payment-auction simulation and verification engine";
  m.attr("__version__") = LPASIM_VERSION;

  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);

  py::class_<SlotLayout>(m, "SlotLayout")
      .def(py::init<>())
      .def(py::init([](std::vector<double> rates) {
             SlotLayout layout{std::move(rates)};
             layout.validate();
             return layout;
           }),
           py::arg("exposure_rates"))
      .def_readwrite("exposure_rates", &SlotLayout::exposure_rates)
      .def("slot_count", &SlotLayout::slot_count)
      .def("exposure_at_rank", &SlotLayout::exposure_at_rank, py::arg("rank"))
      .def("validate", &SlotLayout::validate);

  py::class_<Request>(m, "Request")
      .def(py::init<>())
      .def(py::init([](std::string id, std::vector<double> values,
                       std::vector<double> experiences) {
             return Request{std::move(id), std::move(values),
                            std::move(experiences)};
           }),
           py::arg("id"), py::arg("values"), py::arg("experiences"))
      .def_readwrite("id", &Request::id)
      .def_readwrite("values", &Request::values)
      .def_readwrite("experiences", &Request::experiences);

  py::class_<SellerProfile>(m, "SellerProfile")
      .def(py::init<>())
      .def(py::init([](int id, double budget, double roi_target) {
             return SellerProfile{id, budget, roi_target};
           }),
           py::arg("id"), py::arg("budget"), py::arg("roi_target"))
      .def_readwrite("id", &SellerProfile::id)
      .def_readwrite("budget", &SellerProfile::budget)
      .def_readwrite("roi_target", &SellerProfile::roi_target)
      .def_property_readonly("stock_value", &SellerProfile::stock_value);

  py::class_<Dataset>(m, "Dataset")
      .def(py::init<>())
      .def(py::init([](std::vector<SellerProfile> sellers,
                       std::vector<Request> requests, SlotLayout slots,
                       double kappa) {
             Dataset ds{std::move(sellers), std::move(requests),
                        std::move(slots), kappa};
             ds.validate();
             return ds;
           }),
           py::arg("sellers"), py::arg("requests"), py::arg("slots"),
           py::arg("kappa"))
      .def_readwrite("sellers", &Dataset::sellers)
      .def_readwrite("requests", &Dataset::requests)
      .def_readwrite("slots", &Dataset::slots)
      .def_readwrite("kappa", &Dataset::experience_weight)
      .def("seller_count", &Dataset::seller_count)
      .def("request_count", &Dataset::request_count)
      .def("validate", &Dataset::validate);

  py::class_<AuctionOutcome>(m, "AuctionOutcome")
      .def_readonly("assignment", &AuctionOutcome::assignment)
      .def_readonly("exposures", &AuctionOutcome::exposures)
      .def_readonly("payments", &AuctionOutcome::payments);

  py::class_<MetricsReport>(m, "MetricsReport")
      .def_readonly("lw", &MetricsReport::lw)
      .def_readonly("ue", &MetricsReport::ue)
      .def_readonly("obj", &MetricsReport::obj)
      .def_readonly("rev", &MetricsReport::rev)
      .def_readonly("spend", &MetricsReport::spend)
      .def_readonly("sales_value", &MetricsReport::sales_value)
      .def_readonly("exposure", &MetricsReport::exposure);

  py::enum_<AuctionRule>(m, "AuctionRule")
      .value("LPA", AuctionRule::lpa)
      .value("GFP", AuctionRule::gfp)
      .value("GSP", AuctionRule::gsp)
      .value("VCG", AuctionRule::vcg);
  m.def("rule_from_name",
        [](std::string_view name) { return rule_from_name(name); },
        py::arg("name"));
  m.def("rule_name", [](AuctionRule r) { return std::string(rule_name(r)); },
        py::arg("rule"));

  m.def("rank_scores",
        [](std::vector<double> bids, const Request& request, double kappa) {
          return rank_scores(bids, request, kappa);
        },
        py::arg("bids"), py::arg("request"), py::arg("kappa"));
  m.def("allocate",
        [](std::vector<double> scores, const SlotLayout& slots) {
          return allocate(scores, slots);
        },
        py::arg("scores"), py::arg("slots"));
  m.def("liquid_welfare",
        [](const Dataset& ds, const std::vector<AuctionOutcome>& outcomes) {
          return liquid_welfare(ds, outcomes);
        },
        py::arg("dataset"), py::arg("outcomes"));
  m.def("user_experience",
        [](const Dataset& ds, const std::vector<AuctionOutcome>& outcomes) {
          return user_experience(ds, outcomes);
        },
        py::arg("dataset"), py::arg("outcomes"));
  m.def("revenue",
        [](const Dataset& ds, const std::vector<AuctionOutcome>& outcomes,
           bool truncate) { return revenue(ds, outcomes, truncate); },
        py::arg("dataset"), py::arg("outcomes"), py::arg("truncate") = true);
  m.def("compute_metrics",
        [](const Dataset& ds, const std::vector<AuctionOutcome>& outcomes,
           bool truncate) { return compute_metrics(ds, outcomes, truncate); },
        py::arg("dataset"), py::arg("outcomes"), py::arg("truncate") = true);

  m.def("run_auction",
        [](const Request& request, std::vector<double> bids, const Dataset& ds,
           AuctionRule rule) {
          return run_auction(request, bids, ds.sellers, ds.slots,
                             ds.experience_weight, rule);
        },
        py::arg("request"), py::arg("bids"), py::arg("dataset"),
        py::arg("rule"));
  m.def("gfp_payment", &gfp_payment, py::arg("rank"), py::arg("bid"),
        py::arg("slots"));
  m.def("gsp_payment",
        [](int rank, std::vector<double> scores_desc, double experience,
           double kappa, const SlotLayout& slots) {
          return gsp_payment(rank, scores_desc, experience, kappa, slots);
        },
        py::arg("rank"), py::arg("scores_desc"), py::arg("experience"),
        py::arg("kappa"), py::arg("slots"));
  m.def("vcg_payment",
        [](int rank, std::vector<double> scores_desc, double experience,
           double kappa, const SlotLayout& slots) {
          return vcg_payment(rank, scores_desc, experience, kappa, slots);
        },
        py::arg("rank"), py::arg("scores_desc"), py::arg("experience"),
        py::arg("kappa"), py::arg("slots"));

  py::class_<SimulationTrace>(m, "SimulationTrace")
      .def_readonly("steps", &SimulationTrace::steps)
      .def_readonly("seller_count", &SimulationTrace::seller_count)
      .def_readonly("factors", &SimulationTrace::factors)
      .def_readonly("payments", &SimulationTrace::payments)
      .def_readonly("final_factors", &SimulationTrace::final_factors)
      .def_readonly("outcomes", &SimulationTrace::outcomes)
      .def_readonly("metrics", &SimulationTrace::metrics)
      .def("factor_at", &SimulationTrace::factor_at, py::arg("step"),
           py::arg("seller"))
      .def("payment_at", &SimulationTrace::payment_at, py::arg("step"),
           py::arg("seller"));

  m.def("uniform_bid", &uniform_bid, py::arg("factor"), py::arg("seller"),
        py::arg("request"));
  m.def("pacing_update", &pacing_update, py::arg("factor"), py::arg("budget"),
        py::arg("horizon"), py::arg("paid"), py::arg("learning_rate"));
  m.def("simulate_online", &simulate_online, py::arg("dataset"),
        py::arg("rule"), py::arg("eta") = 0.01);
  m.def("run_offline",
        [](const Dataset& ds, std::vector<double> factors, AuctionRule rule) {
          return run_offline(ds, factors, rule);
        },
        py::arg("dataset"), py::arg("factors"), py::arg("rule"));

  py::class_<EquilibriumResult::Update>(m, "EquilibriumUpdate")
      .def_readonly("seller", &EquilibriumResult::Update::seller)
      .def_readonly("from_factor", &EquilibriumResult::Update::from)
      .def_readonly("to_factor", &EquilibriumResult::Update::to);
  py::class_<EquilibriumResult>(m, "EquilibriumResult")
      .def_readonly("factors", &EquilibriumResult::factors)
      .def_readonly("iterations", &EquilibriumResult::iterations)
      .def_readonly("expected_payments", &EquilibriumResult::expected_payments)
      .def_readonly("epsilon", &EquilibriumResult::epsilon)
      .def_readonly("delta", &EquilibriumResult::delta)
      .def_readonly("updates", &EquilibriumResult::updates);

  py::class_<VerifyReport::Violation>(m, "Violation")
      .def_readonly("seller", &VerifyReport::Violation::seller)
      .def_readonly("condition", &VerifyReport::Violation::condition)
      .def_readonly("margin", &VerifyReport::Violation::margin);
  py::class_<VerifyReport>(m, "VerifyReport")
      .def_readonly("pass_", &VerifyReport::pass)
      .def_readonly("violations", &VerifyReport::violations)
      .def("__bool__", [](const VerifyReport& r) { return r.pass; });

  m.def("expected_payment",
        [](int seller, std::vector<double> factors, const Dataset& ds,
           AuctionRule rule) {
          return expected_payment(seller, factors, ds, rule);
        },
        py::arg("seller"), py::arg("factors"), py::arg("dataset"),
        py::arg("rule") = AuctionRule::lpa);
  m.def("min_pacing_to_spend",
        [](int seller, std::vector<double> factors, double target, double hi,
           const Dataset& ds, double delta) {
          return min_pacing_to_spend(seller, factors, target, hi, ds, delta);
        },
        py::arg("seller"), py::arg("factors"), py::arg("target"),
        py::arg("hi"), py::arg("dataset"), py::arg("delta"));
  m.def("compute_equilibrium",
        [](const Dataset& ds, double epsilon, double delta,
           std::vector<int> scan_order) {
          return compute_equilibrium(ds, epsilon, delta, scan_order);
        },
        py::arg("dataset"), py::arg("epsilon") = 0.01,
        py::arg("delta") = 0.0001, py::arg("scan_order") = std::vector<int>{});
  m.def("verify_epsilon_equilibrium",
        [](std::vector<double> factors, double epsilon, const Dataset& ds) {
          return verify_epsilon_equilibrium(factors, epsilon, ds);
        },
        py::arg("factors"), py::arg("epsilon"), py::arg("dataset"));

  py::class_<DualCertificate>(m, "DualCertificate")
      .def_readonly("multipliers", &DualCertificate::multipliers)
      .def_readonly("dual", &DualCertificate::dual)
      .def_readonly("primal", &DualCertificate::primal)
      .def_readonly("gap", &DualCertificate::gap);

  py::class_<MisreportCell>(m, "MisreportCell")
      .def_readonly("budget_factor", &MisreportCell::budget_factor)
      .def_readonly("roi_factor", &MisreportCell::roi_factor)
      .def_readonly("reported_budget", &MisreportCell::reported_budget)
      .def_readonly("reported_roi", &MisreportCell::reported_roi)
      .def_readonly("sales", &MisreportCell::sales)
      .def_readonly("settled_payment", &MisreportCell::settled_payment)
      .def_readonly("true_objective", &MisreportCell::true_objective)
      .def_readonly("feasible", &MisreportCell::feasible);
  py::class_<MisreportGrid>(m, "MisreportGrid")
      .def_readonly("seller", &MisreportGrid::seller)
      .def_readonly("grid_factors", &MisreportGrid::grid_factors)
      .def_readonly("cells", &MisreportGrid::cells)
      .def_readonly("truthful_index", &MisreportGrid::truthful_index)
      .def("truthful", &MisreportGrid::truthful,
           py::return_value_policy::reference_internal)
      .def("has_feasible_improvement", &MisreportGrid::has_feasible_improvement,
           py::arg("rel_tol"))
      .def("max_feasible_improvement",
           &MisreportGrid::max_feasible_improvement);

  m.def("dual_value",
        [](std::vector<double> multipliers, const Dataset& ds) {
          return dual_value(multipliers, ds);
        },
        py::arg("multipliers"), py::arg("dataset"));
  m.def("primal_value",
        [](std::vector<double> factors, const Dataset& ds) {
          return primal_value(factors, ds);
        },
        py::arg("factors"), py::arg("dataset"));
  m.def("duality_gap",
        [](std::vector<double> factors, const Dataset& ds) {
          return duality_gap(factors, ds);
        },
        py::arg("factors"), py::arg("dataset"));
  m.def("refine_certificate",
        [](std::vector<double> factors, const Dataset& ds, double step,
           int passes) {
          return refine_certificate(factors, ds, step, passes);
        },
        py::arg("factors"), py::arg("dataset"), py::arg("step"),
        py::arg("passes") = 1);
  m.def("score_tie_rate",
        [](const Dataset& ds, std::vector<double> factors) {
          return score_tie_rate(ds, factors);
        },
        py::arg("dataset"), py::arg("factors"));
  m.def("ic_probe",
        [](int seller, const Dataset& ds, std::vector<double> grid_factors,
           double epsilon, double delta) {
          if (grid_factors.empty()) {
            const auto defaults = default_misreport_factors();
            grid_factors.assign(defaults.begin(), defaults.end());
          }
          return ic_probe(seller, ds, grid_factors, epsilon, delta);
        },
        py::arg("seller"), py::arg("dataset"),
        py::arg("grid_factors") = std::vector<double>{},
        py::arg("epsilon") = 0.01, py::arg("delta") = 0.0001);
  m.def("default_misreport_factors", []() {
    const auto factors = default_misreport_factors();
    return std::vector<double>(factors.begin(), factors.end());
  });

  py::class_<SyntheticConfig>(m, "SyntheticConfig")
      .def(py::init<>())
      .def_readwrite("n", &SyntheticConfig::seller_count)
      .def_readwrite("T", &SyntheticConfig::request_count)
      .def_readwrite("slots", &SyntheticConfig::slots)
      .def_readwrite("kappa", &SyntheticConfig::experience_weight)
      .def_readwrite("budget_max", &SyntheticConfig::budget_max)
      .def_readwrite("feature_dim", &SyntheticConfig::feature_dim)
      .def_readwrite("seed", &SyntheticConfig::seed)
      .def_readwrite("zero_features", &SyntheticConfig::zero_features)
      .def("validate", &SyntheticConfig::validate);
  m.def("preset_config",
        [](std::string_view name) { return preset_config(name); },
        py::arg("name"));
  m.def("gen_synthetic", &gen_synthetic, py::arg("config"));
  m.def("load_dataset", &load_dataset, py::arg("sellers_csv"),
        py::arg("requests_csv"), py::arg("slots"), py::arg("kappa"));
  m.def("save_dataset", &save_dataset, py::arg("dataset"),
        py::arg("sellers_csv"), py::arg("requests_csv"));
}
