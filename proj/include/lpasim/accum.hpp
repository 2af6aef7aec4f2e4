#pragma once

#include <cmath>

namespace lpasim {

// Neumaier-compensated accumulator. Metric sums run over up to 1e5 requests
// and must stay order-stable to ~1e-9 relative error.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace lpasim
