#include "subavg/function.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

namespace subavg {

std::uint16_t PeriodicFunction::intern(const Rat& v) {
  for (std::size_t i = 0; i < table_.size(); ++i)
    if (table_[i] == v) return static_cast<std::uint16_t>(i);
  if (table_.size() >= 65535) throw std::overflow_error("value table overflow");
  table_.push_back(v);
  return static_cast<std::uint16_t>(table_.size() - 1);
}

PeriodicFunction PeriodicFunction::constant(const Rat& c, i64 period) {
  PeriodicFunction f;
  f.period_ = period;
  f.table_ = {c};
  f.idx_.assign(static_cast<std::size_t>(period), 0);
  return f;
}

PeriodicFunction PeriodicFunction::scaled_indicator(const Rat& c,
                                                    const std::vector<i64>& support,
                                                    i64 period) {
  PeriodicFunction f;
  f.period_ = period;
  f.table_ = {Rat(0), c};
  f.idx_.assign(static_cast<std::size_t>(period), 0);
  for (i64 x : support) f.idx_[static_cast<std::size_t>(x)] = 1;
  return f;
}

PeriodicFunction PeriodicFunction::from_values(const std::vector<Rat>& values) {
  if (values.empty()) throw std::invalid_argument("empty value vector");
  PeriodicFunction f;
  f.period_ = static_cast<i64>(values.size());
  f.table_.clear();
  f.idx_.resize(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) f.idx_[i] = f.intern(values[i]);
  return f;
}

Rat PeriodicFunction::mean() const {
  std::vector<i64> counts(table_.size(), 0);
  for (std::uint16_t i : idx_) ++counts[i];
  Rat acc(0);
  for (std::size_t i = 0; i < table_.size(); ++i)
    if (counts[i]) acc += table_[i] * rat_of(counts[i]);
  return acc / rat_of(period_);
}

Rat PeriodicFunction::max_value() const {
  Rat best = table_[idx_[0]];
  std::vector<char> seen(table_.size(), 0);
  for (std::uint16_t i : idx_) seen[i] = 1;
  for (std::size_t i = 0; i < table_.size(); ++i)
    if (seen[i] && table_[i] > best) best = table_[i];
  return best;
}

bool PeriodicFunction::nonnegative() const {
  for (const Rat& v : table_)
    if (v < 0) return false;
  return true;
}

bool PeriodicFunction::has_period(i64 s) const {
  s %= period_;
  if (s < 0) s += period_;
  if (s == 0) return true;
  for (i64 x = 0; x < period_; ++x)
    if (idx_[static_cast<std::size_t>(x)] !=
        idx_[static_cast<std::size_t>((x + s) % period_)])
      return false;
  return true;
}

i64 PeriodicFunction::minimal_period() const {
  std::vector<i64> divs;
  for (i64 d = 1; d * d <= period_; ++d) {
    if (period_ % d != 0) continue;
    divs.push_back(d);
    if (d != period_ / d) divs.push_back(period_ / d);
  }
  std::sort(divs.begin(), divs.end());
  for (i64 d : divs)
    if (has_period(d)) return d;
  return period_;
}

PeriodicFunction PeriodicFunction::reduced() const {
  const i64 m = minimal_period();
  if (m == period_) return *this;
  std::vector<Rat> vals;
  vals.reserve(static_cast<std::size_t>(m));
  for (i64 x = 0; x < m; ++x) vals.push_back(at(x));
  return PeriodicFunction::from_values(vals);
}

PeriodicFunction PeriodicFunction::scaled(const Rat& c) const {
  PeriodicFunction f = *this;
  for (Rat& v : f.table_) v *= c;
  return f;
}

PeriodicFunction PeriodicFunction::restricted(const std::vector<i64>& support,
                                              i64 support_period) const {
  const i64 np = std::lcm(period_, support_period);
  std::vector<char> in(static_cast<std::size_t>(support_period), 0);
  for (i64 x : support) in[static_cast<std::size_t>(x)] = 1;
  PeriodicFunction f;
  f.period_ = np;
  f.table_ = {Rat(0)};
  f.idx_.assign(static_cast<std::size_t>(np), 0);
  for (i64 x = 0; x < np; ++x)
    if (in[static_cast<std::size_t>(x % support_period)])
      f.idx_[static_cast<std::size_t>(x)] = f.intern(at(x));
  return f;
}

PeriodicFunction PeriodicFunction::lifted(i64 new_period) const {
  if (new_period % period_ != 0)
    throw std::invalid_argument("lift target must be a multiple of the period");
  PeriodicFunction f;
  f.period_ = new_period;
  f.table_ = table_;
  f.idx_.resize(static_cast<std::size_t>(new_period));
  for (i64 x = 0; x < new_period; ++x)
    f.idx_[static_cast<std::size_t>(x)] = idx_[static_cast<std::size_t>(x % period_)];
  return f;
}

PeriodicFunction PeriodicFunction::sum(const std::vector<const PeriodicFunction*>& fs,
                                       i64 period) {
  PeriodicFunction out;
  out.period_ = period;
  out.table_.clear();
  out.idx_.resize(static_cast<std::size_t>(period));
  std::map<std::vector<std::uint16_t>, std::uint16_t> memo;
  for (i64 x = 0; x < period; ++x) {
    std::vector<std::uint16_t> key;
    key.reserve(fs.size());
    for (const auto* f : fs) key.push_back(f->index_at(x));
    auto it = memo.find(key);
    if (it == memo.end()) {
      Rat v(0);
      for (const auto* f : fs) v += f->at(x);
      it = memo.emplace(key, out.intern(v)).first;
    }
    out.idx_[static_cast<std::size_t>(x)] = it->second;
  }
  return out;
}

}  // namespace subavg
