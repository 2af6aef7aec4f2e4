#pragma once

#include <cstdint>
#include <vector>

#include "lpasim/data.hpp"
#include "lpasim/rng.hpp"

namespace lpasim::test {

// Two sellers, one slot, one request: the payment of seller 0 is a step
// function of its factor with the jump at 0.8 (tie goes to seller 0).
inline Dataset two_seller_step_fixture() {
  Dataset ds;
  ds.sellers = {{0, 4.0, 1.0}, {1, 100.0, 1.0}};
  ds.requests = {{"0", {10.0, 8.0}, {0.0, 0.0}}};
  ds.slots = SlotLayout{{1.0}};
  ds.experience_weight = 0.0;
  return ds;
}

inline Dataset small_synthetic(std::uint64_t seed, int sellers = 4,
                               std::size_t requests = 60) {
  SyntheticConfig config;
  config.seller_count = sellers;
  config.request_count = requests;
  config.seed = seed;
  return gen_synthetic(config);
}

inline std::vector<double> random_profile(SplitMix64& gen, std::size_t n) {
  std::vector<double> factors(n);
  for (double& a : factors) {
    a = static_cast<double>(gen.next() >> 11) * 0x1.0p-53;
  }
  return factors;
}

inline std::vector<int> random_permutation(SplitMix64& gen, std::size_t n) {
  std::vector<int> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<int>(i);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = gen.next() % i;
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

}  // namespace lpasim::test
