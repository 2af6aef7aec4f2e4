// lpasim: liquid-payment-auction simulator and verifier.
//
// Subcommands: gen (synthetic datasets), compare (offline baseline vs online
// rules), sweep (kappa Pareto rows), certify (equilibrium + duality-gap
// certificate), ic (misreport grid probe).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lpasim/accum.hpp"
#include "lpasim/data.hpp"
#include "lpasim/report.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

#ifndef LPASIM_VERSION
#define LPASIM_VERSION "0.0.0"
#endif

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitCertificate = 3;
constexpr int kExitInternal = 4;

struct Options {
  std::string preset = "synthetic";
  std::string config_path;
  std::string sellers_path;
  std::string requests_path;
  std::vector<std::string> rules;
  std::string beta_list;
  std::string kappa_sweep;
  std::string grid_list;
  double kappa = std::numeric_limits<double>::quiet_NaN();
  double eta = 0.01;
  double epsilon = 0.01;
  double delta = std::numeric_limits<double>::quiet_NaN();
  double gap_tol = 0.01;
  double ic_tol = 0.005;
  std::uint64_t seed = 1;
  bool seed_given = false;
  long long n = -1;
  long long requests_n = -1;
  double budget_max = -1.0;
  long long feature_dim = -1;
  bool zero_features = false;
  bool no_truncate = false;
  int seller = -1;
  std::string out_dir = "out";
  std::string format = "json";
};

std::vector<double> split_doubles(const std::string& text, const char* what) {
  std::vector<double> values;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string token =
        text.substr(start, comma == std::string::npos ? std::string::npos
                                                      : comma - start);
    if (token.empty()) {
      throw std::invalid_argument(std::string(what) +
                                  ": empty entry in list '" + text + "'");
    }
    try {
      std::size_t used = 0;
      values.push_back(std::stod(token, &used));
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string(what) + ": cannot parse '" +
                                  token + "'");
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return values;
}

json config_to_json(const lpasim::SyntheticConfig& config) {
  return {{"n", config.seller_count},
          {"T", config.request_count},
          {"beta", config.slots.exposure_rates},
          {"kappa", config.experience_weight},
          {"budget_max", config.budget_max},
          {"feature_dim", config.feature_dim},
          {"seed", config.seed},
          {"zero_features", config.zero_features}};
}

void config_from_json(const json& j, lpasim::SyntheticConfig& config) {
  if (j.contains("n")) config.seller_count = j.at("n").get<int>();
  if (j.contains("T")) config.request_count = j.at("T").get<std::size_t>();
  if (j.contains("beta")) {
    config.slots.exposure_rates = j.at("beta").get<std::vector<double>>();
  }
  if (j.contains("kappa")) config.experience_weight = j.at("kappa").get<double>();
  if (j.contains("budget_max")) config.budget_max = j.at("budget_max").get<double>();
  if (j.contains("feature_dim")) config.feature_dim = j.at("feature_dim").get<int>();
  if (j.contains("seed")) config.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("zero_features")) {
    config.zero_features = j.at("zero_features").get<bool>();
  }
}

// Resolved dataset source plus the config echo for the manifest.
struct ResolvedInput {
  lpasim::Dataset dataset;
  json echo;
};

lpasim::SyntheticConfig resolve_config(const Options& opt) {
  lpasim::SyntheticConfig config = lpasim::preset_config(opt.preset);
  if (!opt.config_path.empty()) {
    std::ifstream in(opt.config_path);
    if (!in) {
      throw lpasim::DataError("cannot open config file " + opt.config_path);
    }
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw lpasim::DataError(opt.config_path + ": " + e.what());
    }
    config_from_json(j, config);
  }
  if (opt.n >= 0) config.seller_count = static_cast<int>(opt.n);
  if (opt.requests_n >= 0) {
    config.request_count = static_cast<std::size_t>(opt.requests_n);
  }
  if (!opt.beta_list.empty()) {
    config.slots.exposure_rates = split_doubles(opt.beta_list, "--beta");
  }
  if (!std::isnan(opt.kappa)) config.experience_weight = opt.kappa;
  if (opt.budget_max > 0.0) config.budget_max = opt.budget_max;
  if (opt.feature_dim >= 0) config.feature_dim = static_cast<int>(opt.feature_dim);
  if (opt.seed_given) config.seed = opt.seed;
  if (opt.zero_features) config.zero_features = true;
  config.validate();
  return config;
}

ResolvedInput resolve_dataset(const Options& opt) {
  const bool file_source =
      !opt.sellers_path.empty() || !opt.requests_path.empty();
  if (file_source) {
    if (opt.sellers_path.empty() || opt.requests_path.empty()) {
      throw std::invalid_argument(
          "--sellers and --requests must be given together");
    }
    if (opt.n >= 0 || opt.requests_n >= 0 || opt.seed_given) {
      throw std::invalid_argument(
          "--n/--T/--seed do not apply to a file-backed dataset");
    }
    lpasim::SyntheticConfig shape = lpasim::preset_config(opt.preset);
    if (!opt.beta_list.empty()) {
      shape.slots.exposure_rates = split_doubles(opt.beta_list, "--beta");
    }
    if (!std::isnan(opt.kappa)) shape.experience_weight = opt.kappa;
    shape.slots.validate();
    ResolvedInput input{
        lpasim::load_dataset(opt.sellers_path, opt.requests_path, shape.slots,
                             shape.experience_weight),
        json{{"source", "files"},
             {"sellers", opt.sellers_path},
             {"requests", opt.requests_path},
             {"beta", shape.slots.exposure_rates},
             {"kappa", shape.experience_weight}}};
    return input;
  }
  const lpasim::SyntheticConfig config = resolve_config(opt);
  ResolvedInput input{lpasim::gen_synthetic(config), config_to_json(config)};
  input.echo["source"] = "synthetic";
  input.echo["preset"] = opt.preset;
  return input;
}

std::vector<lpasim::AuctionRule> resolve_rules(const Options& opt) {
  if (opt.rules.empty()) {
    return {lpasim::kAllRules.begin(), lpasim::kAllRules.end()};
  }
  std::vector<lpasim::AuctionRule> rules;
  for (const std::string& name : opt.rules) {
    const lpasim::AuctionRule rule = lpasim::rule_from_name(name);
    if (std::find(rules.begin(), rules.end(), rule) == rules.end()) {
      rules.push_back(rule);
    }
  }
  return rules;
}

double resolve_delta(const Options& opt) {
  return std::isnan(opt.delta) ? opt.epsilon / 100.0 : opt.delta;
}

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw lpasim::DataError("cannot write " + path.string());
  out << text;
  if (!out.flush()) throw lpasim::DataError("failed writing " + path.string());
}

void write_json(const fs::path& path, const json& value) {
  write_text(path, value.dump(2) + "\n");
}

void write_manifest(const Options& opt, const std::string& command,
                    const json& echo) {
  json manifest = {{"command", command},
                   {"version", LPASIM_VERSION},
                   {"config", echo},
                   {"options",
                    {{"eta", opt.eta},
                     {"epsilon", opt.epsilon},
                     {"delta", resolve_delta(opt)},
                     {"truncate", !opt.no_truncate},
                     {"format", opt.format},
                     {"out", opt.out_dir}}},
                   {"generated_at", timestamp_utc()}};
  write_json(fs::path(opt.out_dir) / "manifest.json", manifest);
}

void ensure_out_dir(const Options& opt) {
  std::error_code ec;
  fs::create_directories(opt.out_dir, ec);
  if (ec) {
    throw lpasim::DataError("cannot create output directory " + opt.out_dir +
                            ": " + ec.message());
  }
}

int cmd_gen(const Options& opt) {
  const lpasim::SyntheticConfig config = resolve_config(opt);
  ensure_out_dir(opt);
  const lpasim::Dataset dataset = lpasim::gen_synthetic(config);
  const fs::path out(opt.out_dir);
  lpasim::save_dataset(dataset, out / "sellers.csv", out / "requests.csv");
  json echo = config_to_json(config);
  echo["source"] = "synthetic";
  echo["preset"] = opt.preset;
  write_manifest(opt, "gen", echo);

  lpasim::CompensatedSum value_sum, exp_sum, budget_sum;
  for (const lpasim::Request& q : dataset.requests) {
    for (double v : q.values) value_sum.add(v);
    for (double e : q.experiences) exp_sum.add(e);
  }
  for (const lpasim::SellerProfile& s : dataset.sellers) {
    budget_sum.add(s.budget);
  }
  const double cells = static_cast<double>(dataset.request_count()) *
                       static_cast<double>(dataset.seller_count());
  std::cout << "wrote " << (out / "sellers.csv").string() << ", "
            << (out / "requests.csv").string() << "\n"
            << "sellers: " << dataset.seller_count()
            << "  requests: " << dataset.request_count() << "\n"
            << "mean v: " << value_sum.value() / cells
            << "  mean e: " << exp_sum.value() / cells
            << "  total budget: " << budget_sum.value() << "\n";
  return kExitOk;
}

int cmd_compare(const Options& opt) {
  ResolvedInput input = resolve_dataset(opt);
  const std::vector<lpasim::AuctionRule> rules = resolve_rules(opt);
  ensure_out_dir(opt);
  const lpasim::ComparisonReport report =
      lpasim::run_comparison(input.dataset, rules, opt.eta, opt.epsilon,
                             resolve_delta(opt), !opt.no_truncate);
  const json report_json = lpasim::comparison_to_json(report);
  const std::string csv = lpasim::comparison_to_csv(report);
  const fs::path out(opt.out_dir);
  write_json(out / "metrics.json", report_json);
  write_text(out / "comparison.csv", csv);
  write_manifest(opt, "compare", input.echo);
  if (opt.format == "csv") {
    std::cout << csv;
  } else {
    std::cout << report_json.dump(2) << "\n";
  }
  return kExitOk;
}

int cmd_sweep(const Options& opt) {
  ResolvedInput input = resolve_dataset(opt);
  const std::vector<lpasim::AuctionRule> rules = resolve_rules(opt);
  std::vector<double> kappas;
  if (opt.kappa_sweep.empty()) {
    for (int k = -4; k <= 4; ++k) kappas.push_back(std::pow(2.0, k));
  } else {
    kappas = split_doubles(opt.kappa_sweep, "--kappa-sweep");
  }
  ensure_out_dir(opt);
  const std::vector<lpasim::SweepRow> rows =
      lpasim::run_sweep(input.dataset, kappas, rules, opt.eta);
  const std::string csv = lpasim::sweep_to_csv(rows);
  const fs::path out(opt.out_dir);
  write_text(out / "pareto.csv", csv);
  input.echo["kappa_sweep"] = kappas;
  write_manifest(opt, "sweep", input.echo);
  if (opt.format == "csv") {
    std::cout << csv;
  } else {
    std::cout << lpasim::sweep_to_json(rows).dump(2) << "\n";
  }
  return kExitOk;
}

int cmd_certify(const Options& opt) {
  ResolvedInput input = resolve_dataset(opt);
  ensure_out_dir(opt);
  const lpasim::CertificationReport report = lpasim::run_certification(
      input.dataset, opt.epsilon, resolve_delta(opt), opt.gap_tol);
  const json report_json = lpasim::certification_to_json(report);
  write_json(fs::path(opt.out_dir) / "certificate.json", report_json);
  write_manifest(opt, "certify", input.echo);
  std::cout << report_json.dump(2) << "\n";
  if (report.status == "fail") {
    std::cerr << "certificate failed: gap " << report.gap << " ("
              << 100.0 * report.gap_relative << "% of primal), "
              << report.verification.violations.size()
              << " verifier violation(s)\n";
    return kExitCertificate;
  }
  if (report.status == "warn") {
    std::cerr << "certificate WARN: tie rate " << report.tie_rate
              << " exceeds 1%, gap not conclusive on atom-heavy data\n";
  }
  return kExitOk;
}

int cmd_ic(const Options& opt) {
  ResolvedInput input = resolve_dataset(opt);
  if (opt.seller < 0 || opt.seller >= input.dataset.seller_count()) {
    throw std::invalid_argument("--seller must name a seller index in [0, " +
                                std::to_string(input.dataset.seller_count()) +
                                ")");
  }
  std::vector<double> factors;
  if (opt.grid_list.empty()) {
    const auto defaults = lpasim::default_misreport_factors();
    factors.assign(defaults.begin(), defaults.end());
  } else {
    factors = split_doubles(opt.grid_list, "--grid");
  }
  ensure_out_dir(opt);
  const lpasim::MisreportGrid grid = lpasim::ic_probe(
      opt.seller, input.dataset, factors, opt.epsilon, resolve_delta(opt));
  const json report_json = lpasim::misreport_grid_to_json(grid, opt.ic_tol);
  write_json(fs::path(opt.out_dir) / "ic_grid.json", report_json);
  input.echo["seller"] = opt.seller;
  input.echo["grid"] = factors;
  write_manifest(opt, "ic", input.echo);
  std::cout << report_json.dump(2) << "\n";
  if (grid.has_feasible_improvement(opt.ic_tol)) {
    std::cerr << "misreport probe found a feasible improvement of "
              << 100.0 * grid.max_feasible_improvement()
              << "% over truthful reporting\n";
    return kExitCertificate;
  }
  return kExitOk;
}

void add_dataset_flags(CLI::App* cmd, Options& opt, bool with_files) {
  cmd->add_option("--preset", opt.preset,
                  "Named config preset (synthetic, realworld-shape)");
  cmd->add_option("--config", opt.config_path,
                  "JSON file with synthetic-config fields");
  cmd->add_option("--n,--num-sellers", opt.n, "Seller count");
  cmd->add_option("--T,--num-requests", opt.requests_n, "Request count");
  cmd->add_option("--beta", opt.beta_list,
                  "Comma-separated slot exposure rates");
  cmd->add_option("--kappa", opt.kappa, "Experience weight");
  cmd->add_option("--budget-max", opt.budget_max,
                  "Upper end of the budget distribution");
  cmd->add_option("--feature-dim", opt.feature_dim, "Feature dimension");
  cmd->add_flag("--zero-features", opt.zero_features,
                "Debug: zero all feature vectors (v becomes 1)");
  cmd->add_option("--seed", opt.seed, "RNG seed")
      ->each([&opt](const std::string&) { opt.seed_given = true; });
  if (with_files) {
    cmd->add_option("--sellers", opt.sellers_path, "Sellers CSV path");
    cmd->add_option("--requests", opt.requests_path, "Requests CSV path");
  }
}

void add_run_flags(CLI::App* cmd, Options& opt) {
  cmd->add_option("--eta", opt.eta, "Online pacing learning rate");
  cmd->add_option("--epsilon", opt.epsilon, "Equilibrium slack");
  cmd->add_option("--delta", opt.delta,
                  "Bisection bracket width (default epsilon/100)");
  cmd->add_flag("--no-truncate", opt.no_truncate,
                "Report revenue without budget truncation");
}

void add_out_flags(CLI::App* cmd, Options& opt) {
  cmd->add_option("--out", opt.out_dir, "Output directory");
  cmd->add_option("--format", opt.format, "Console format")
      ->check(CLI::IsMember({"json", "csv"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Liquid-payment-auction simulator and verifier"};
  app.require_subcommand(1);
  Options opt;

  CLI::App* gen = app.add_subcommand("gen", "Generate a synthetic dataset");
  add_dataset_flags(gen, opt, /*with_files=*/false);
  add_out_flags(gen, opt);

  CLI::App* compare = app.add_subcommand(
      "compare", "Offline-equilibrium baseline vs online auctions");
  add_dataset_flags(compare, opt, /*with_files=*/true);
  compare->add_option("--rule", opt.rules, "Restrict to these payment rules");
  add_run_flags(compare, opt);
  add_out_flags(compare, opt);

  CLI::App* sweep =
      app.add_subcommand("sweep", "Online runs over a kappa sweep");
  add_dataset_flags(sweep, opt, /*with_files=*/true);
  sweep->add_option("--rule", opt.rules, "Restrict to these payment rules");
  sweep->add_option("--kappa-sweep", opt.kappa_sweep,
                    "Comma-separated kappa values (default 2^-4..2^4)");
  add_run_flags(sweep, opt);
  add_out_flags(sweep, opt);

  CLI::App* certify = app.add_subcommand(
      "certify", "Equilibrium verification plus duality-gap certificate");
  add_dataset_flags(certify, opt, /*with_files=*/true);
  add_run_flags(certify, opt);
  certify->add_option("--gap-tol", opt.gap_tol,
                      "Maximum relative duality gap");
  add_out_flags(certify, opt);

  CLI::App* ic =
      app.add_subcommand("ic", "Misreport grid probe for one seller");
  add_dataset_flags(ic, opt, /*with_files=*/true);
  add_run_flags(ic, opt);
  ic->add_option("--seller", opt.seller, "Seller index to probe")->required();
  ic->add_option("--grid", opt.grid_list,
                 "Comma-separated multiplicative misreport factors");
  ic->add_option("--ic-tol", opt.ic_tol,
                 "Maximum tolerated relative improvement");
  add_out_flags(ic, opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed()) return cmd_gen(opt);
    if (compare->parsed()) return cmd_compare(opt);
    if (sweep->parsed()) return cmd_sweep(opt);
    if (certify->parsed()) return cmd_certify(opt);
    if (ic->parsed()) return cmd_ic(opt);
    return kExitUsage;
  } catch (const lpasim::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}
