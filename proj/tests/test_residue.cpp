#include <doctest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "subavg/residue.hpp"

using namespace subavg;

namespace {

// independent brute-force oracle: d-th power residues by full enumeration
std::vector<i64> brute_power_residues(i64 t, int d) {
  std::set<i64> acc;
  for (i64 k = 1; k <= t; ++k) {
    if (std::gcd(k, t) != 1) continue;
    i64 v = 1;
    for (int e = 0; e < d; ++e) v = (v * k) % t;
    acc.insert(v);
  }
  return {acc.begin(), acc.end()};
}

}  // namespace

TEST_CASE("power residues match the brute-force oracle") {
  CHECK(power_residues(5, 2).elements == std::vector<i64>{1, 4});
  CHECK(power_residues(13, 3).elements == std::vector<i64>{1, 5, 8, 12});
  CHECK(power_residues(2, 2).elements == std::vector<i64>{1});
  for (i64 t : {7, 12, 36, 65, 221, 1105}) {
    CHECK(power_residues(t, 2).elements == brute_power_residues(t, 2));
  }
  CHECK_THROWS(power_residues(1, 2));
  CHECK_THROWS(power_residues(10, 1));
}

TEST_CASE("coprime residues") {
  CHECK(coprime_residues(6).elements == std::vector<i64>{1, 5});
  CHECK(coprime_residues(5).elements == std::vector<i64>{1, 2, 3, 4});
  CHECK(coprime_residues(15).elements == std::vector<i64>{1, 2, 4, 7, 8, 11, 13, 14});
  CHECK_THROWS(coprime_residues(1));
}

TEST_CASE("combine_crt agrees with direct construction") {
  ResidueSet l3 = power_residues(3, 2);
  ResidueSet l5 = power_residues(5, 2);
  ResidueSet l15 = combine_crt(l3, l5);
  CHECK(l15.elements == std::vector<i64>{1, 4});
  CHECK(l15.elements == power_residues(15, 2).elements);

  // identity factor: full residue system mod t
  ResidueSet full;
  full.modulus = 4;
  full.elements = {0, 1, 2, 3};
  ResidueSet lifted = combine_crt(l5, full);
  CHECK(lifted.size() == l5.size() * 4);
  for (i64 x : lifted.elements) CHECK(l5.contains(x % 5));

  CHECK(combine_crt(power_residues(5, 2), power_residues(13, 2)).size() == 12);
  CHECK_THROWS(combine_crt(l15, l5));
}

TEST_CASE("multiplicativity over coprime pairs up to 10^4") {
  // spec invariant: Lambda_{st} = CRT(Lambda_s, Lambda_t) for gcd(s,t)=1
  std::vector<std::pair<i64, i64>> pairs;
  for (i64 s = 2; s <= 100; ++s)
    for (i64 t = s + 1; s * t <= 10000 && t <= 100; ++t)
      if (std::gcd(s, t) == 1) pairs.emplace_back(s, t);
  int checked = 0;
  for (auto [s, t] : pairs) {
    if (checked > 120) break;  // representative slice, ascending
    ResidueSet direct = power_residues(s * t, 2);
    ResidueSet combined = combine_crt(power_residues(s, 2), power_residues(t, 2));
    REQUIRE(direct.elements == combined.elements);
    ResidueSet cd = coprime_residues(s * t);
    ResidueSet cc = combine_crt(coprime_residues(s), coprime_residues(t));
    REQUIRE(cd.elements == cc.elements);
    ++checked;
  }
  CHECK(checked > 100);
}

namespace {

int prime_factor_count(i64 v) {
  int kappa = 0;
  for (i64 f = 2; f * f <= v; ++f) {
    if (v % f == 0) {
      ++kappa;
      while (v % f == 0) v /= f;
    }
  }
  if (v > 1) ++kappa;
  return kappa;
}

}  // namespace

TEST_CASE("root counts: 2^kappa square roots per residue") {
  for (i64 q : {15, 65, 1105, 1155, 9867}) {
    ResidueSet lam = power_residues(q, 2);
    std::map<i64, int> roots;
    for (i64 k = 1; k <= q; ++k) {
      if (std::gcd(k, q) != 1) continue;
      roots[(k * k) % q]++;
    }
    const int expected = 1 << prime_factor_count(q);
    for (i64 a : lam.elements) REQUIRE(roots[a] == expected);
  }
}

TEST_CASE("thicken: discretised offsets and cardinality bound") {
  ResidueSet l5 = power_residues(5, 2);
  CHECK(thicken_offsets(l5, rat(1, 2)) == 1);
  CHECK(thicken(l5, rat(1, 2)) == std::vector<i64>{0, 2});

  // gamma*s_t <= 1 gives the empty set
  ResidueSet dense;
  dense.modulus = 10;
  dense.elements = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  CHECK(thicken(dense, rat(1, 2)).empty());

  ResidueSet l15 = power_residues(15, 2);
  const Rat g = rat(1, 4);
  const auto th = thicken(l15, g);
  CHECK(rat_of(static_cast<i64>(th.size())) <= g * rat_of(15));
  // bound holds across a small sweep
  for (i64 q : {65, 1105}) {
    ResidueSet lam = power_residues(q, 2);
    for (int num = 1; num < 8; ++num) {
      const Rat gamma = rat(num, 8);
      CHECK(rat_of(static_cast<i64>(thicken(lam, gamma).size())) <= gamma * rat_of(q));
    }
  }
}

TEST_CASE("negate is an involution and preserves cardinality") {
  ResidueSet l5 = power_residues(5, 2);
  CHECK(negate(l5).elements == std::vector<i64>{1, 4});
  ResidueSet l3;
  l3.modulus = 3;
  l3.elements = {1};
  CHECK(negate(l3).elements == std::vector<i64>{2});
  ResidueSet l7;
  l7.modulus = 7;
  l7.elements = {1, 2, 4};
  CHECK(negate(l7).elements == std::vector<i64>{3, 5, 6});
  for (i64 q : {15, 65, 1155}) {
    ResidueSet lam = power_residues(q, 2);
    ResidueSet back = negate(negate(lam));
    CHECK(back.elements == lam.elements);
    CHECK(negate(lam).size() == lam.size());
  }
}

TEST_CASE("nth_terms") {
  SequenceSpec sq{SeqKind::kPower, 2};
  CHECK(nth_terms(sq, 4) == std::vector<i64>{1, 4, 9, 16});
  SequenceSpec pr{SeqKind::kPrime, 2};
  CHECK(nth_terms(pr, 5) == std::vector<i64>{2, 3, 5, 7, 11});
  SequenceSpec cu{SeqKind::kPower, 3};
  CHECK(nth_terms(cu, 3) == std::vector<i64>{1, 8, 27});
  // strictly increasing
  auto ps = nth_terms(pr, 2000);
  CHECK(std::adjacent_find(ps.begin(), ps.end(), std::greater_equal<i64>()) == ps.end());
  CHECK(ps[1999] == 17389);
}

TEST_CASE("qset products") {
  QsetCatalog cat;
  cat.p_pool = {5};
  cat.q_pool = {221};
  CHECK(qset_products(cat, 2000) == std::vector<i64>{1, 5, 221, 1105});
  QsetCatalog empty;
  CHECK(qset_products(empty, 100) == std::vector<i64>{1});
  QsetCatalog two;
  two.p_pool = {3, 5};
  CHECK(qset_products(two, 14) == std::vector<i64>{1, 3, 5});
  QsetCatalog bad;
  bad.p_pool = {3, 9};
  CHECK_THROWS(bad.validate());
  QsetCatalog even;
  even.p_pool = {4};
  CHECK_THROWS(even.validate());
}

TEST_CASE("streaming terms match nth_terms") {
  for (auto kind : {SeqKind::kPower, SeqKind::kPrime}) {
    SequenceSpec seq{kind, 2};
    auto terms = nth_terms(seq, 300);
    std::vector<i64> got;
    for_each_term_mod(seq, 97, 300, [&](i64, i64 r) { got.push_back(r); });
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == terms[i] % 97);
  }
}
