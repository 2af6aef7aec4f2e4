#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string_view>

#include "lpasim/model.hpp"

namespace lpasim {

/// Raised on malformed or unwritable dataset files; the message carries the
/// offending row where one exists.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SyntheticConfig {
  int seller_count = 10;
  std::size_t request_count = 100000;
  SlotLayout slots{{1.0, 0.6, 0.4}};
  double experience_weight = 1.0;
  double budget_max = 100000.0;
  int feature_dim = 10;
  std::uint64_t seed = 1;
  bool zero_features = false;  // debug switch: all feature vectors zero

  void validate() const;
};

/// Named presets: "synthetic" (the defaults above) and "realworld-shape"
/// (50 sellers, 6 slots at (1,.8,.7,.6,.5,.4), experience weight 0.5).
SyntheticConfig preset_config(std::string_view name);

/// Deterministic generator. Budgets are uniform on (0, budget_max]; inverse
/// ROI targets are uniform on (0, 1); sales values are exp(<product feature,
/// user feature>/sqrt(dim)) over standard-normal features; experience is
/// (r1 * value + 0.2 * r2) / 2 with fresh uniforms per seller-request pair.
/// Every entity draws from its own substream, so the output is a pure
/// function of (config, seed) and stable under resizing.
Dataset gen_synthetic(const SyntheticConfig& config);

/// Reads the two-file CSV format:
///   sellers.csv:  seller_id,budget,roi
///   requests.csv: request_id,seller_id,v,e   (long form)
/// Requests are ordered by first appearance of request_id and every
/// (request, seller) pair must appear exactly once.
Dataset load_dataset(const std::filesystem::path& sellers_csv,
                     const std::filesystem::path& requests_csv,
                     SlotLayout slots, double experience_weight);

/// Inverse of load_dataset; numbers carry 17 significant digits so a
/// round-trip is lossless. Refuses to write a dataset without requests.
void save_dataset(const Dataset& dataset,
                  const std::filesystem::path& sellers_csv,
                  const std::filesystem::path& requests_csv);

}  // namespace lpasim
