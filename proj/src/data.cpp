#include "lpasim/data.hpp"

#include <array>
#include <cassert>
#include <charconv>
#include <cmath>
#include <fstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "lpasim/rng.hpp"

namespace lpasim {

namespace {

constexpr std::uint64_t kSellerTag = 0x53454c4c45520001ull;
constexpr std::uint64_t kRequestTag = 0x5245515545535401ull;
constexpr std::uint64_t kPairTag = 0x5041495200000001ull;

std::string format17(double value) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                                 std::chars_format::general, 17);
  return std::string(buf.data(), res.ptr);
}

[[noreturn]] void fail(const std::filesystem::path& file, std::size_t row,
                       const std::string& what) {
  throw DataError(file.string() + ", row " + std::to_string(row) + ": " +
                  what);
}

double parse_double(std::string_view token, const std::filesystem::path& file,
                    std::size_t row, const char* column) {
  double value = 0.0;
  const auto res =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (res.ec != std::errc{} || res.ptr != token.data() + token.size()) {
    fail(file, row, std::string("cannot parse ") + column + " '" +
                        std::string(token) + "'");
  }
  return value;
}

long parse_int(std::string_view token, const std::filesystem::path& file,
               std::size_t row, const char* column) {
  long value = 0;
  const auto res =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (res.ec != std::errc{} || res.ptr != token.data() + token.size()) {
    fail(file, row, std::string("cannot parse ") + column + " '" +
                        std::string(token) + "'");
  }
  return value;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

// Reads all lines, dropping a trailing '\r' so CRLF files load too.
std::vector<std::string> read_lines(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) {
    throw DataError("cannot open " + file.string());
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

}  // namespace

void SyntheticConfig::validate() const {
  if (seller_count < 1) {
    throw std::invalid_argument("seller count must be at least 1");
  }
  if (request_count < 1) {
    throw std::invalid_argument("request count must be at least 1");
  }
  slots.validate();
  if (!std::isfinite(experience_weight) || experience_weight < 0.0) {
    throw std::invalid_argument("experience weight must be non-negative");
  }
  if (!std::isfinite(budget_max) || budget_max <= 0.0) {
    throw std::invalid_argument("budget_max must be positive");
  }
  if (feature_dim < 1) {
    throw std::invalid_argument("feature dimension must be at least 1");
  }
}

SyntheticConfig preset_config(std::string_view name) {
  if (name == "synthetic") {
    return SyntheticConfig{};
  }
  if (name == "realworld-shape") {
    SyntheticConfig config;
    config.seller_count = 50;
    config.slots = SlotLayout{{1.0, 0.8, 0.7, 0.6, 0.5, 0.4}};
    config.experience_weight = 0.5;
    return config;
  }
  throw std::invalid_argument("unknown preset '" + std::string(name) +
                              "' (expected synthetic or realworld-shape)");
}

Dataset gen_synthetic(const SyntheticConfig& config) {
  config.validate();
  const std::size_t n = static_cast<std::size_t>(config.seller_count);
  const std::size_t dim = static_cast<std::size_t>(config.feature_dim);
  const double inv_sqrt_dim = 1.0 / std::sqrt(static_cast<double>(dim));

  Dataset dataset;
  dataset.slots = config.slots;
  dataset.experience_weight = config.experience_weight;

  // Per-seller stream: budget, inverse ROI, then the product features.
  std::vector<double> product_features(n * dim, 0.0);
  dataset.sellers.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    StreamRng rng(config.seed, kSellerTag, i);
    SellerProfile seller;
    seller.id = static_cast<int>(i);
    seller.budget = rng.uniform_positive() * config.budget_max;
    seller.roi_target = 1.0 / rng.uniform_positive();
    if (!config.zero_features) {
      for (std::size_t d = 0; d < dim; ++d) {
        product_features[i * dim + d] = rng.normal();
      }
    }
    dataset.sellers.push_back(seller);
  }

  dataset.requests.reserve(config.request_count);
  std::vector<double> user_features(dim, 0.0);
  for (std::size_t t = 0; t < config.request_count; ++t) {
    StreamRng rng(config.seed, kRequestTag, t);
    if (!config.zero_features) {
      for (std::size_t d = 0; d < dim; ++d) user_features[d] = rng.normal();
    }
    Request q;
    q.id = std::to_string(t);
    q.values.resize(n);
    q.experiences.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      double dot = 0.0;
      if (!config.zero_features) {
        for (std::size_t d = 0; d < dim; ++d) {
          dot += product_features[i * dim + d] * user_features[d];
        }
      }
      const double value = std::exp(dot * inv_sqrt_dim);
      StreamRng pair_rng(config.seed, kPairTag, i, t);
      const double r1 = pair_rng.uniform();
      const double r2 = pair_rng.uniform();
      q.values[i] = value;
      q.experiences[i] = 0.5 * (r1 * value + 0.2 * r2);
    }
    dataset.requests.push_back(std::move(q));
  }
  return dataset;
}

Dataset load_dataset(const std::filesystem::path& sellers_csv,
                     const std::filesystem::path& requests_csv,
                     SlotLayout slots, double experience_weight) {
  Dataset dataset;
  dataset.slots = std::move(slots);
  dataset.experience_weight = experience_weight;

  // sellers.csv
  const std::vector<std::string> seller_lines = read_lines(sellers_csv);
  if (seller_lines.empty() || seller_lines[0] != "seller_id,budget,roi") {
    throw DataError(sellers_csv.string() +
                    ": expected header 'seller_id,budget,roi'");
  }
  std::unordered_map<long, std::size_t> seller_index;
  for (std::size_t row = 1; row < seller_lines.size(); ++row) {
    if (seller_lines[row].empty()) continue;
    const auto fields = split_fields(seller_lines[row]);
    if (fields.size() != 3) {
      fail(sellers_csv, row + 1, "expected 3 fields");
    }
    const long ext_id = parse_int(fields[0], sellers_csv, row + 1, "seller_id");
    if (seller_index.contains(ext_id)) {
      fail(sellers_csv, row + 1,
           "duplicate seller_id " + std::to_string(ext_id));
    }
    SellerProfile seller;
    seller.id = static_cast<int>(dataset.sellers.size());
    seller.budget = parse_double(fields[1], sellers_csv, row + 1, "budget");
    seller.roi_target = parse_double(fields[2], sellers_csv, row + 1, "roi");
    if (!std::isfinite(seller.budget) || seller.budget <= 0.0) {
      fail(sellers_csv, row + 1, "budget must be positive");
    }
    if (!std::isfinite(seller.roi_target) || seller.roi_target <= 0.0) {
      fail(sellers_csv, row + 1, "roi must be positive");
    }
    seller_index.emplace(ext_id, dataset.sellers.size());
    dataset.sellers.push_back(seller);
  }
  const std::size_t n = dataset.sellers.size();
  if (n == 0) {
    throw DataError(sellers_csv.string() + ": no sellers");
  }

  // requests.csv, long form; request order is first appearance.
  const std::vector<std::string> request_lines = read_lines(requests_csv);
  if (request_lines.empty() ||
      request_lines[0] != "request_id,seller_id,v,e") {
    throw DataError(requests_csv.string() +
                    ": expected header 'request_id,seller_id,v,e'");
  }
  std::unordered_map<std::string, std::size_t> request_index;
  std::vector<std::vector<bool>> seen;
  for (std::size_t row = 1; row < request_lines.size(); ++row) {
    if (request_lines[row].empty()) continue;
    const auto fields = split_fields(request_lines[row]);
    if (fields.size() != 4) {
      fail(requests_csv, row + 1, "expected 4 fields");
    }
    const std::string request_id(fields[0]);
    const long ext_seller =
        parse_int(fields[1], requests_csv, row + 1, "seller_id");
    const auto seller_it = seller_index.find(ext_seller);
    if (seller_it == seller_index.end()) {
      fail(requests_csv, row + 1,
           "unknown seller_id " + std::to_string(ext_seller));
    }
    const std::size_t i = seller_it->second;

    auto [req_it, inserted] =
        request_index.emplace(request_id, dataset.requests.size());
    if (inserted) {
      Request q;
      q.id = request_id;
      q.values.assign(n, 0.0);
      q.experiences.assign(n, 0.0);
      dataset.requests.push_back(std::move(q));
      seen.emplace_back(n, false);
    }
    const std::size_t t = req_it->second;
    if (seen[t][i]) {
      fail(requests_csv, row + 1,
           "duplicate pair (request '" + request_id + "', seller " +
               std::to_string(ext_seller) + ")");
    }
    seen[t][i] = true;
    const double v = parse_double(fields[2], requests_csv, row + 1, "v");
    const double e = parse_double(fields[3], requests_csv, row + 1, "e");
    if (!std::isfinite(v) || v < 0.0) {
      fail(requests_csv, row + 1, "v must be finite and >= 0");
    }
    if (!std::isfinite(e) || e < 0.0) {
      fail(requests_csv, row + 1, "e must be finite and >= 0");
    }
    dataset.requests[t].values[i] = v;
    dataset.requests[t].experiences[i] = e;
  }
  if (dataset.requests.empty()) {
    throw DataError(requests_csv.string() + ": no requests");
  }
  for (std::size_t t = 0; t < dataset.requests.size(); ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!seen[t][i]) {
        throw DataError(requests_csv.string() + ": request '" +
                        dataset.requests[t].id +
                        "' is missing the row for seller " +
                        std::to_string(i));
      }
    }
  }
  dataset.validate();
  return dataset;
}

void save_dataset(const Dataset& dataset,
                  const std::filesystem::path& sellers_csv,
                  const std::filesystem::path& requests_csv) {
  if (dataset.requests.empty() || dataset.sellers.empty()) {
    throw DataError("refusing to write an empty dataset");
  }
  for (const Request& q : dataset.requests) {
    if (q.id.find_first_of(",\"\r\n") != std::string::npos) {
      throw DataError("request id '" + q.id +
                      "' contains characters unsupported by the CSV format");
    }
  }

  std::ofstream sellers(sellers_csv, std::ios::trunc);
  if (!sellers) {
    throw DataError("cannot write " + sellers_csv.string());
  }
  sellers << "seller_id,budget,roi\n";
  for (const SellerProfile& s : dataset.sellers) {
    sellers << s.id << ',' << format17(s.budget) << ','
            << format17(s.roi_target) << '\n';
  }
  if (!sellers.flush()) {
    throw DataError("failed writing " + sellers_csv.string());
  }

  std::ofstream requests(requests_csv, std::ios::trunc);
  if (!requests) {
    throw DataError("cannot write " + requests_csv.string());
  }
  requests << "request_id,seller_id,v,e\n";
  for (const Request& q : dataset.requests) {
    for (std::size_t i = 0; i < dataset.sellers.size(); ++i) {
      requests << q.id << ',' << i << ',' << format17(q.values[i]) << ','
               << format17(q.experiences[i]) << '\n';
    }
  }
  if (!requests.flush()) {
    throw DataError("failed writing " + requests_csv.string());
  }
}

}  // namespace lpasim
