#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace rcga {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Welford mean/variance. Merging follows Chan et al.; merge in a fixed
/// order to get bit-identical results.
class RunningStats {
 public:
  void add(double x) noexcept {
    ++count_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(count_);
    m2_ += d * (x - mean_);
  }

  void merge(const RunningStats& o) noexcept {
    if (o.count_ == 0) return;
    if (count_ == 0) {
      *this = o;
      return;
    }
    const double total = static_cast<double>(count_ + o.count_);
    const double d = o.mean_ - mean_;
    mean_ += d * static_cast<double>(o.count_) / total;
    m2_ += o.m2_ + d * d * static_cast<double>(count_) * static_cast<double>(o.count_) / total;
    count_ += o.count_;
  }

  std::uint64_t count() const noexcept { return count_; }
  double mean() const noexcept { return count_ ? mean_ : std::numeric_limits<double>::quiet_NaN(); }

  /// Sample variance (n-1 denominator); 0 for a single sample.
  double variance() const noexcept {
    return count_ > 1 ? m2_ / static_cast<double>(count_ - 1) : 0.0;
  }
  double stddev() const noexcept { return std::sqrt(variance()); }
  double standard_error() const noexcept {
    return count_ ? stddev() / std::sqrt(static_cast<double>(count_)) : 0.0;
  }

 private:
  std::uint64_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

}  // namespace rcga
