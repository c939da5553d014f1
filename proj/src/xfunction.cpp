#include <algorithm>
#include <map>
#include <stdexcept>

#include "subavg/family.hpp"

namespace subavg {

bool XFactor::pass(i64 x) const {
  for (const auto& plan : warps) x = plan.warp(x);
  if (is_interval) {
    i64 r = x % modulus;
    if (r < 0) r += modulus;
    return r < bound;
  }
  i64 r = x % bitmap_period;
  if (r < 0) r += bitmap_period;
  return bitmap[static_cast<std::size_t>(r)] != 0;
}

XFactor XFactor::interval(i64 modulus, i64 bound) {
  XFactor f;
  f.is_interval = true;
  f.modulus = modulus;
  f.bound = bound;
  return f;
}

XFactor XFactor::set(const std::vector<i64>& members, i64 period) {
  XFactor f;
  f.is_interval = false;
  f.bitmap_period = period;
  f.bitmap.assign(static_cast<std::size_t>(period), 0);
  for (i64 m : members) {
    i64 r = m % period;
    if (r < 0) r += period;
    f.bitmap[static_cast<std::size_t>(r)] = 1;
  }
  return f;
}

bool XTerm::pass(i64 x) const {
  for (const auto& f : factors)
    if (!f.pass(x)) return false;
  return true;
}

XFunction XFunction::constant(const Rat& c) {
  XFunction f;
  f.period_ = 1;
  if (c != 0) f.terms_.push_back(XTerm{c, {}});
  return f;
}

Rat XFunction::at(i64 x) const {
  i64 r = x % period_;
  if (r < 0) r += period_;
  Rat acc(0);
  for (const auto& t : terms_)
    if (t.pass(r)) acc += t.coeff;
  return acc;
}

Rat XFunction::mean(i64 cap) const {
  Rat acc(0);
  for (const auto& [v, p] : distribution(cap)) acc += v * p;
  return acc;
}

std::vector<std::pair<Rat, Rat>> XFunction::distribution(i64 cap) const {
  if (period_ > cap)
    throw std::runtime_error("XFunction: period " + std::to_string(period_) +
                             " exceeds enumeration cap " + std::to_string(cap));
  // term pass-patterns repeat; count per pattern then fold to values
  std::map<std::uint64_t, i64> pattern_count;
  if (terms_.size() > 63) throw std::runtime_error("XFunction: too many terms");
  for (i64 x = 0; x < period_; ++x) {
    std::uint64_t key = 0;
    for (std::size_t j = 0; j < terms_.size(); ++j)
      if (terms_[j].pass(x)) key |= (1ull << j);
    ++pattern_count[key];
  }
  std::map<Rat, i64> value_count;
  for (const auto& [key, cnt] : pattern_count) {
    Rat v(0);
    for (std::size_t j = 0; j < terms_.size(); ++j)
      if (key & (1ull << j)) v += terms_[j].coeff;
    value_count[v] += cnt;
  }
  std::vector<std::pair<Rat, Rat>> out;
  for (const auto& [v, cnt] : value_count) out.emplace_back(v, rat_of(cnt, period_));
  return out;
}

XFunction XFunction::warped(const RearrangementPlan& plan) const {
  XFunction out;
  out.period_ = plan.p * period_;
  out.terms_ = terms_;
  for (auto& t : out.terms_)
    for (auto& f : t.factors) f.warps.insert(f.warps.begin(), plan);
  return out;
}

XFunction XFunction::scaled(const Rat& c) const {
  XFunction out = *this;
  for (auto& t : out.terms_) t.coeff *= c;
  return out;
}

XFunction XFunction::with_factor(const XFactor& f) const {
  XFunction out = *this;
  for (auto& t : out.terms_) t.factors.push_back(f);
  return out;
}

XFunction XFunction::plus(const XFunction& other) const {
  XFunction out = *this;
  out.period_ = std::lcm(period_, other.period());
  for (const auto& t : other.terms()) out.terms_.push_back(t);
  return out;
}

PeriodicFunction XFunction::materialize(i64 cap) const {
  if (period_ > cap) throw std::runtime_error("XFunction: materialize beyond cap");
  std::vector<Rat> vals;
  vals.reserve(static_cast<std::size_t>(period_));
  for (i64 x = 0; x < period_; ++x) vals.push_back(at(x));
  return PeriodicFunction::from_values(vals);
}

}  // namespace subavg
