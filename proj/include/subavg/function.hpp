#pragma once

#include <cstdint>
#include <vector>

#include "subavg/rational.hpp"
#include "subavg/residue.hpp"

namespace subavg {

// Exact nonnegative rational function on Z_period. Values are held as a
// small table of distinct rationals plus a per-residue index, which keeps
// multi-million-point functions compact and makes histograms cheap.
class PeriodicFunction {
 public:
  PeriodicFunction() : period_(1), table_{Rat(0)}, idx_(1, 0) {}

  static PeriodicFunction constant(const Rat& c, i64 period = 1);
  // c * indicator of `support` (subset of Z_period).
  static PeriodicFunction scaled_indicator(const Rat& c, const std::vector<i64>& support,
                                           i64 period);
  static PeriodicFunction from_values(const std::vector<Rat>& values);

  i64 period() const { return period_; }
  const Rat& at(i64 x) const {
    i64 r = x % period_;
    if (r < 0) r += period_;
    return table_[idx_[static_cast<std::size_t>(r)]];
  }
  std::uint16_t index_at(i64 x) const {
    i64 r = x % period_;
    if (r < 0) r += period_;
    return idx_[static_cast<std::size_t>(r)];
  }
  const std::vector<Rat>& table() const { return table_; }
  const std::vector<std::uint16_t>& indices() const { return idx_; }

  Rat mean() const;
  Rat max_value() const;
  bool nonnegative() const;
  // true when shifting by s leaves the function unchanged
  bool has_period(i64 s) const;
  // smallest divisor of the period that is itself a period
  i64 minimal_period() const;
  PeriodicFunction reduced() const;

  // pointwise combination helpers (periods must divide lcm <= cap)
  PeriodicFunction scaled(const Rat& c) const;
  PeriodicFunction restricted(const std::vector<i64>& support, i64 support_period) const;
  // lift to a larger period (multiple of the current one)
  PeriodicFunction lifted(i64 new_period) const;

  static PeriodicFunction sum(const std::vector<const PeriodicFunction*>& fs, i64 period);

 private:
  i64 period_;
  std::vector<Rat> table_;
  std::vector<std::uint16_t> idx_;

  std::uint16_t intern(const Rat& v);
};

}  // namespace subavg
