#include "subavg/residue.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "subavg/rational.hpp"

namespace subavg {

i64 gcd_i64(i64 a, i64 b) { return std::gcd(a, b); }

i64 isqrt_i64(i64 n) {
  if (n < 0) throw std::domain_error("isqrt of negative");
  i64 r = static_cast<i64>(std::sqrt(static_cast<double>(n)));
  while (r > 0 && r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

i64 mulmod(i64 a, i64 b, i64 m) {
  return static_cast<i64>(static_cast<__int128>(a) * b % m);
}

bool ResidueSet::contains(i64 x) const {
  return std::binary_search(elements.begin(), elements.end(), x);
}

i64 ResidueSet::min_circular_distance(i64 x) const {
  if (elements.empty()) return modulus;
  x = ((x % modulus) + modulus) % modulus;
  auto it = std::lower_bound(elements.begin(), elements.end(), x);
  i64 best = modulus;
  auto probe = [&](i64 y) {
    i64 d = std::abs(x - y);
    best = std::min({best, d, modulus - d});
  };
  if (it != elements.end()) probe(*it);
  if (it != elements.begin()) probe(*(it - 1));
  probe(elements.front());
  probe(elements.back());
  return best;
}

void ResidueSet::validate() const {
  if (modulus < 1) throw std::invalid_argument("ResidueSet: modulus < 1");
  for (std::size_t i = 0; i < elements.size(); ++i) {
    if (elements[i] < 0 || elements[i] >= modulus)
      throw std::invalid_argument("ResidueSet: element out of range");
    if (i > 0 && elements[i] <= elements[i - 1])
      throw std::invalid_argument("ResidueSet: elements not strictly increasing");
  }
}

void SequenceSpec::validate() const {
  if (kind == SeqKind::kPower && exponent < 2)
    throw std::invalid_argument("power sequence needs d >= 2");
}

void QsetCatalog::validate() const {
  std::vector<i64> all;
  all.insert(all.end(), p_pool.begin(), p_pool.end());
  all.insert(all.end(), q_pool.begin(), q_pool.end());
  for (i64 v : all) {
    if (v < 3 || v % 2 == 0)
      throw std::invalid_argument("pool members must be odd and > 1");
  }
  for (std::size_t i = 0; i < all.size(); ++i)
    for (std::size_t j = i + 1; j < all.size(); ++j)
      if (gcd_i64(all[i], all[j]) != 1)
        throw std::invalid_argument("pool members must be pairwise coprime");
}

std::vector<i64> QsetCatalog::products(i64 bound) const {
  validate();
  std::vector<i64> members;
  members.insert(members.end(), p_pool.begin(), p_pool.end());
  members.insert(members.end(), q_pool.begin(), q_pool.end());
  std::vector<i64> out{1};
  for (i64 m : members) {
    std::size_t n = out.size();
    for (std::size_t i = 0; i < n; ++i) {
      if (out[i] <= bound / m) out.push_back(out[i] * m);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::remove_if(out.begin(), out.end(), [&](i64 v) { return v > bound; }),
            out.end());
  return out;
}

bool QsetCatalog::in_qset(i64 q) const {
  if (q == 1) return true;
  std::vector<i64> members;
  members.insert(members.end(), p_pool.begin(), p_pool.end());
  members.insert(members.end(), q_pool.begin(), q_pool.end());
  i64 rest = q;
  for (i64 m : members) {
    if (rest % m == 0) rest /= m;
    if (rest == 1) return true;
  }
  return rest == 1;
}

ResidueSet power_residues(i64 t, int d) {
  if (t <= 1) throw std::invalid_argument("power_residues: modulus must be >= 2");
  if (d < 2) throw std::invalid_argument("power_residues: exponent must be >= 2");
  std::set<i64> acc;
  for (i64 k = 1; k <= t; ++k) {
    if (gcd_i64(k, t) != 1) continue;
    i64 v = 1;
    i64 base = k % t;
    for (int e = 0; e < d; ++e) v = mulmod(v, base, t);
    acc.insert(v);
  }
  ResidueSet out;
  out.modulus = t;
  out.elements.assign(acc.begin(), acc.end());
  return out;
}

ResidueSet coprime_residues(i64 t) {
  if (t <= 1) throw std::invalid_argument("coprime_residues: modulus must be >= 2");
  ResidueSet out;
  out.modulus = t;
  for (i64 a = 0; a < t; ++a)
    if (gcd_i64(a, t) == 1) out.elements.push_back(a);
  return out;
}

ResidueSet admissible_residues(const SequenceSpec& seq, i64 t) {
  if (t == 1) {
    ResidueSet out;
    out.modulus = 1;
    out.elements = {0};
    return out;
  }
  if (seq.kind == SeqKind::kPower) return power_residues(t, seq.exponent);
  return coprime_residues(t);
}

ResidueSet combine_crt(const ResidueSet& a, const ResidueSet& b) {
  if (gcd_i64(a.modulus, b.modulus) != 1)
    throw std::invalid_argument("combine_crt: moduli must be coprime");
  const i64 s = a.modulus, t = b.modulus, st = s * t;
  // x = u + s*k with x == v mod t: k = (v-u) * s^{-1} mod t
  i64 sinv = 1;
  for (i64 k = 0; k < t; ++k) {
    if ((__int128)s * k % t == 1 % t) {
      sinv = k;
      break;
    }
  }
  ResidueSet out;
  out.modulus = st;
  out.elements.reserve(a.size() * b.size());
  for (i64 u : a.elements) {
    for (i64 v : b.elements) {
      i64 k = mulmod(((v - u) % t + t) % t, sinv, t);
      out.elements.push_back(u + s * k);
    }
  }
  std::sort(out.elements.begin(), out.elements.end());
  return out;
}

i64 thicken_offsets(const ResidueSet& lam, const Rat& gamma) {
  if (gamma <= 0 || gamma >= 1) throw std::invalid_argument("gamma must be in (0,1)");
  if (lam.elements.empty()) return 0;
  Rat gs = gamma * lam.mean_spacing();
  return to_i64(rat_ceil(gs)) - 1;
}

std::vector<i64> thicken(const ResidueSet& lam, const Rat& gamma) {
  const i64 m = thicken_offsets(lam, gamma);
  const i64 t = lam.modulus;
  std::vector<i64> out;
  if (m <= 0) return out;
  // fresh points of the i-th interval [l_i+1, l_i+m]: min(gap_i, m)
  out.reserve(lam.size() * static_cast<std::size_t>(m));
  for (i64 l : lam.elements)
    for (i64 u = 1; u <= m; ++u) out.push_back((l + u) % t);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

ResidueSet negate(const ResidueSet& lam) {
  ResidueSet out;
  out.modulus = lam.modulus;
  out.elements.reserve(lam.size());
  for (i64 x : lam.elements) out.elements.push_back((lam.modulus - x) % lam.modulus);
  std::sort(out.elements.begin(), out.elements.end());
  return out;
}

std::vector<i64> primes_up_to(i64 limit) {
  std::vector<i64> primes;
  if (limit < 2) return primes;
  const i64 root = isqrt_i64(limit);
  std::vector<char> small(root + 1, 1);
  for (i64 i = 2; i * i <= root; ++i)
    if (small[i])
      for (i64 j = i * i; j <= root; j += i) small[j] = 0;
  std::vector<i64> base;
  for (i64 i = 2; i <= root; ++i)
    if (small[i]) base.push_back(i);

  const i64 segment = std::max<i64>(1 << 18, root + 1);
  std::vector<char> sieve;
  for (i64 low = 2; low <= limit; low += segment) {
    const i64 high = std::min(low + segment - 1, limit);
    sieve.assign(high - low + 1, 1);
    for (i64 p : base) {
      if (p * p > high) break;
      i64 start = std::max(p * p, ((low + p - 1) / p) * p);
      for (i64 j = start; j <= high; j += p) sieve[j - low] = 0;
    }
    for (i64 v = low; v <= high; ++v)
      if (sieve[v - low]) primes.push_back(v);
  }
  return primes;
}

std::vector<i64> first_primes(i64 n) {
  if (n <= 0) return {};
  // p_n < n(ln n + ln ln n) for n >= 6
  double nd = static_cast<double>(std::max<i64>(n, 6));
  i64 limit = static_cast<i64>(nd * (std::log(nd) + std::log(std::log(nd))) + 16);
  std::vector<i64> ps = primes_up_to(limit);
  while (static_cast<i64>(ps.size()) < n) {
    limit = limit * 3 / 2 + 64;
    ps = primes_up_to(limit);
  }
  ps.resize(n);
  return ps;
}

std::vector<i64> nth_terms(const SequenceSpec& seq, i64 n) {
  if (n < 1) throw std::invalid_argument("nth_terms: need n >= 1");
  seq.validate();
  std::vector<i64> out;
  out.reserve(n);
  if (seq.kind == SeqKind::kPower) {
    for (i64 k = 1; k <= n; ++k) {
      i64 v = 1;
      for (int e = 0; e < seq.exponent; ++e) v *= k;
      out.push_back(v);
    }
    return out;
  }
  return first_primes(n);
}

std::vector<i64> qset_products(const QsetCatalog& catalog, i64 bound) {
  return catalog.products(bound);
}

}  // namespace subavg
