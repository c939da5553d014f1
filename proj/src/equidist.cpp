#include "subavg/equidist.hpp"

#include <algorithm>
#include <stdexcept>

namespace subavg {

i64 SubsetRule::next_above(i64 n) const {
  switch (kind) {
    case Kind::kAllIntegers:
      return n + 1;
    case Kind::kPowersOfTwo: {
      i64 s = 1;
      while (s <= n) s *= 2;
      return s;
    }
  }
  return n + 1;
}

bool SubsetRule::member(i64 s) const {
  if (s < 1) return false;
  if (kind == Kind::kAllIntegers) return true;
  return (s & (s - 1)) == 0;
}

std::map<i64, i64> residue_counts(const SequenceSpec& seq, i64 Q, i64 n) {
  if (Q < 1 || n < 1) throw std::invalid_argument("residue_counts: Q,N must be >= 1");
  const ResidueSet lam = admissible_residues(seq, Q);
  std::map<i64, i64> out;
  for (i64 a : lam.elements) out[a] = 0;
  for_each_term_mod(seq, Q, n, [&](i64, i64 r) {
    auto it = out.find(r);
    if (it != out.end()) ++it->second;
  });
  return out;
}

EquidistScan scan_equidistribution(const SequenceSpec& seq, i64 Q, const Rat& beta,
                                   i64 horizon) {
  if (beta <= 0 || beta >= 1) throw std::invalid_argument("beta must be in (0,1)");
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  const ResidueSet lam = admissible_residues(seq, Q);
  const i64 nl = static_cast<i64>(lam.size());
  const i64 b1 = to_i64(Int(beta.get_num()));
  const i64 b2 = to_i64(Int(beta.get_den()));

  // class index per residue, -1 for residues outside Lambda_Q
  std::vector<int> cls(Q, -1);
  for (std::size_t i = 0; i < lam.size(); ++i) cls[lam.elements[i]] = static_cast<int>(i);

  std::vector<i64> count(lam.size(), 0);
  std::vector<i64> window_start(lam.size(), 1);  // first N with the current count
  i64 last_fail = 0;

  // Between consecutive hits the count is constant and the threshold grows,
  // so each window contributes its tail [max(start, ceil(c*nl*b2/b1)), end].
  auto close_window = [&](std::size_t a, i64 end_n) {
    if (end_n < window_start[a]) return;
    // fail iff count*nl*b2 <= b1*N
    const __int128 lhs = static_cast<__int128>(count[a]) * nl * b2;
    const i64 thr = static_cast<i64>((lhs + b1 - 1) / b1);  // smallest failing N
    const i64 lo = std::max(window_start[a], thr);
    if (lo <= end_n) last_fail = std::max(last_fail, end_n);
  };

  for_each_term_mod(seq, Q, horizon, [&](i64 k, i64 r) {
    const int a = cls[r];
    if (a < 0) return;
    close_window(static_cast<std::size_t>(a), k - 1);
    ++count[static_cast<std::size_t>(a)];
    window_start[static_cast<std::size_t>(a)] = k;
  });
  for (std::size_t a = 0; a < lam.size(); ++a) close_window(a, horizon);

  EquidistScan scan;
  scan.Q = Q;
  scan.beta = beta;
  scan.horizon = horizon;
  for (std::size_t i = 0; i < lam.size(); ++i)
    scan.counts.emplace_back(lam.elements[i], count[i]);
  scan.empirical_n = last_fail;
  scan.stabilized = last_fail <= horizon / 2;
  return scan;
}

i64 empirical_N(const SequenceSpec& seq, i64 Q, const Rat& beta, i64 horizon,
                bool* stabilized) {
  const EquidistScan scan = scan_equidistribution(seq, Q, beta, horizon);
  if (stabilized) *stabilized = scan.stabilized;
  return scan.empirical_n;
}

PsiOracle::PsiOracle(SequenceSpec seq, QsetCatalog pools, Rat beta, i64 horizon,
                     SubsetRule s)
    : seq_(std::move(seq)), pools_(std::move(pools)), beta_(std::move(beta)),
      horizon_(horizon), s_(s) {}

i64 PsiOracle::horizon_for(i64 Q) const {
  // enough slack for the early-hit irregularities of moderate moduli
  return std::max<i64>(horizon_, 8 * Q);
}

i64 PsiOracle::cached_N(i64 Q) {
  auto it = cache_.find(Q);
  if (it != cache_.end()) return it->second;
  i64 n = 0;
  if (Q > 1) {
    bool stable = true;
    n = empirical_N(seq_, Q, beta_, horizon_for(Q), &stable);
    if (!stable)
      warnings_.push_back("empirical_N(" + std::to_string(Q) +
                          ") not stabilized at horizon " +
                          std::to_string(horizon_for(Q)));
  }
  cache_[Q] = n;
  return n;
}

i64 PsiOracle::psi(i64 n) {
  i64 worst = 0;
  for (i64 Q : pools_.products(n)) worst = std::max(worst, cached_N(Q));
  return s_.next_above(worst);
}

}  // namespace subavg
