#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "subavg/rational.hpp"

namespace subavg {

using i64 = std::int64_t;

// A subset of Z_t, sorted, together with exact density and mean spacing.
struct ResidueSet {
  i64 modulus = 1;
  std::vector<i64> elements;  // strictly increasing, in [0, modulus)

  std::size_t size() const { return elements.size(); }
  Rat density() const { return rat_of(static_cast<i64>(elements.size()), modulus); }
  Rat mean_spacing() const { return rat_of(modulus, static_cast<i64>(elements.size())); }
  bool contains(i64 x) const;

  // Circular distance from x to the nearest element.
  i64 min_circular_distance(i64 x) const;

  void validate() const;  // throws on broken invariants
};

enum class SeqKind { kPower, kPrime };

struct SequenceSpec {
  SeqKind kind = SeqKind::kPower;
  int exponent = 2;  // d, only for kPower; d >= 2

  void validate() const;
};

// Pools {p_j}, {q_j} of pairwise coprime odd integers and their squarefree
// products.
struct QsetCatalog {
  std::vector<i64> p_pool;
  std::vector<i64> q_pool;

  void validate() const;  // pairwise coprime, odd, no repeats
  // All squarefree products of distinct pool members (1 included), sorted,
  // capped at `bound`.
  std::vector<i64> products(i64 bound) const;
  bool in_qset(i64 q) const;
};

// { k^d mod t : k in [1,t], gcd(k,t)=1 }, sorted.
ResidueSet power_residues(i64 t, int d);

// Units of Z_t.
ResidueSet coprime_residues(i64 t);

// Admissible residues of the sequence mod t.
ResidueSet admissible_residues(const SequenceSpec& seq, i64 t);

// CRT combination: { x mod st : x mod s in a, x mod t in b }, gcd(s,t)=1.
ResidueSet combine_crt(const ResidueSet& a, const ResidueSet& b);

// Number of integer offsets in the discretised open interval (0, gamma*s_t):
// m = ceil(gamma*s_t) - 1.
i64 thicken_offsets(const ResidueSet& lam, const Rat& gamma);

// Lambda + {1..m} mod t, sorted. |result| <= gamma*t.
std::vector<i64> thicken(const ResidueSet& lam, const Rat& gamma);

// { (t - x) mod t : x in Lambda }, sorted.
ResidueSet negate(const ResidueSet& lam);

// n_1..n_N of the sequence (k^d, or the primes via a segmented sieve).
std::vector<i64> nth_terms(const SequenceSpec& seq, i64 n);

// Streams n_k mod Q for k = 1..N without materialising the sequence.
// visit(k, n_k mod Q) is called in order.
template <typename F>
void for_each_term_mod(const SequenceSpec& seq, i64 q, i64 n, F&& visit);

// Primes in [2, limit], segmented sieve.
std::vector<i64> primes_up_to(i64 limit);

// At least n primes.
std::vector<i64> first_primes(i64 n);

std::vector<i64> qset_products(const QsetCatalog& catalog, i64 bound);

i64 gcd_i64(i64 a, i64 b);
i64 isqrt_i64(i64 n);
i64 mulmod(i64 a, i64 b, i64 m);

// --- implementation of the streaming template ---

template <typename F>
void for_each_term_mod(const SequenceSpec& seq, i64 q, i64 n, F&& visit) {
  if (seq.kind == SeqKind::kPower) {
    i64 r = 0;  // k mod q
    for (i64 k = 1; k <= n; ++k) {
      if (++r == q) r = 0;
      i64 v = r;
      i64 acc = 1;
      for (int e = 0; e < seq.exponent; ++e) acc = mulmod(acc, v, q);
      visit(k, acc);
    }
    return;
  }
  // primes: sieve in segments large enough for n primes
  const std::vector<i64> ps = first_primes(n);
  for (i64 k = 1; k <= n; ++k) visit(k, ps[static_cast<std::size_t>(k - 1)] % q);
}

}  // namespace subavg
