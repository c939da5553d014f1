#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "subavg/rational.hpp"
#include "subavg/residue.hpp"

namespace subavg {

// Generator rule for the infinite subset S of N used by psi.
struct SubsetRule {
  enum class Kind { kAllIntegers, kPowersOfTwo } kind = Kind::kAllIntegers;

  // Smallest s in S with s > n.
  i64 next_above(i64 n) const;
  bool member(i64 s) const;
};

struct EquidistScan {
  i64 Q = 1;
  Rat beta;
  i64 horizon = 0;
  std::vector<std::pair<i64, i64>> counts;  // (a, count at horizon) for a in Lambda_Q
  i64 empirical_n = 0;                      // largest N <= H where some class fails
  bool stabilized = true;                   // no failure in (H/2, H]
};

// Exact per-class counts |{k <= N : n_k = a mod Q}| for a in Lambda_Q.
std::map<i64, i64> residue_counts(const SequenceSpec& seq, i64 Q, i64 n);

// Largest N <= H such that some a in Lambda_Q has count <= beta*N/|Lambda_Q|,
// or 0 if none. A lower estimate of the true horizon; `stabilized` is false
// when a failure lands in (H/2, H].
EquidistScan scan_equidistribution(const SequenceSpec& seq, i64 Q, const Rat& beta,
                                   i64 horizon);

i64 empirical_N(const SequenceSpec& seq, i64 Q, const Rat& beta, i64 horizon,
                bool* stabilized = nullptr);

// Caches empirical_N per Q and answers psi(n) = inf{s in S : s > N(Q) for all
// Q in Qset with Q <= n}. Horizon warnings accumulate in `warnings`.
class PsiOracle {
 public:
  PsiOracle(SequenceSpec seq, QsetCatalog pools, Rat beta, i64 horizon, SubsetRule s);

  i64 psi(i64 n);
  i64 horizon_for(i64 Q) const;
  i64 cached_N(i64 Q);  // empirical_N with caching
  const std::vector<std::string>& warnings() const { return warnings_; }
  const SubsetRule& subset_rule() const { return s_; }
  const Rat& beta() const { return beta_; }
  const QsetCatalog& pools() const { return pools_; }
  const SequenceSpec& sequence() const { return seq_; }

 private:
  SequenceSpec seq_;
  QsetCatalog pools_;
  Rat beta_;
  i64 horizon_;
  SubsetRule s_;
  std::map<i64, i64> cache_;
  std::vector<std::string> warnings_;
};

}  // namespace subavg
