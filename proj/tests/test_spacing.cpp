#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "subavg/spacing.hpp"

using namespace subavg;

namespace {

ResidueSet from_elems(std::vector<i64> v, i64 t) {
  ResidueSet r;
  r.modulus = t;
  r.elements = std::move(v);
  return r;
}

// brute-force zeta: double loop over (i, k) with rational circular distances
Rat brute_zeta(const ResidueSet& lam, std::size_t l, const Rat& theta) {
  const SpacingProfile prof = SpacingProfile::from(lam);
  const i64 n = prof.count;
  const Rat circ = rat_of(n);
  i64 cnt = 0;
  for (i64 i = 0; i < n; ++i) {
    bool all_far = true;
    for (i64 k = 0; k < n; ++k) {
      Rat d = prof.point(static_cast<std::size_t>(i)) -
              prof.point(static_cast<std::size_t>(l - 1)) -
              prof.point(static_cast<std::size_t>(k));
      while (d < 0) d += circ;
      while (d >= circ) d -= circ;
      Rat dist = std::min(d, Rat(circ - d));
      if (!(dist > theta)) {
        all_far = false;
        break;
      }
    }
    if (all_far) ++cnt;
  }
  return rat_of(cnt, n);
}

ResidueSet random_increasing_set(std::mt19937_64& rng, int len) {
  const i64 t = len * 8 + static_cast<i64>(rng() % 64);
  std::vector<i64> pool(static_cast<std::size_t>(t));
  std::iota(pool.begin(), pool.end(), 0);
  std::shuffle(pool.begin(), pool.end(), rng);
  pool.resize(static_cast<std::size_t>(len));
  std::sort(pool.begin(), pool.end());
  return from_elems(pool, t);
}

}  // namespace

TEST_CASE("gap cdf on Lambda_5") {
  const SpacingProfile prof = SpacingProfile::from(power_residues(5, 2));
  // normalized points 2/5, 8/5; gaps 6/5 and 4/5
  CHECK(gap_cdf(prof, rat(1)) == rat(1, 2));
  CHECK(gap_cdf(prof, rat(0)) == rat(1));
  CHECK(gap_cdf(prof, rat(2)) == rat(0));
  CHECK(gap_cdf(prof, rat(5)) == rat(0));
}

TEST_CASE("gap cdf is nonincreasing; gaps sum to |Lambda|") {
  const SpacingProfile prof = SpacingProfile::from(power_residues(1105, 2));
  Rat prev = rat(2);
  for (int i = 0; i <= 32; ++i) {
    const Rat v = gap_cdf(prof, rat(i, 16));
    CHECK(v <= prev);
    prev = v;
  }
  Rat total(0);
  for (std::size_t i = 0; i < prof.scaled_gaps.size(); ++i) total += prof.gap(i);
  CHECK(total == rat_of(prof.count));
}

TEST_CASE("thickened measure identity") {
  auto [lhs5, rhs5] = thickened_measure_identity(power_residues(5, 2), rat(1, 2));
  CHECK(lhs5 == 2);
  CHECK(rhs5 == 2);

  // m = 0 gives the empty thickening on both sides
  ResidueSet dense = from_elems({0, 1, 2, 3, 4, 5, 6, 7, 8, 9}, 10);
  auto [l0, r0] = thickened_measure_identity(dense, rat(1, 2));
  CHECK(l0 == 0);
  CHECK(r0 == 0);

  for (i64 q : {15, 65, 1105, 32045}) {
    ResidueSet lam = power_residues(q, 2);
    for (int num = 1; num <= 3; ++num) {
      auto [lhs, rhs] = thickened_measure_identity(lam, rat(num, 4));
      REQUIRE(lhs == rhs);
    }
  }
}

TEST_CASE("zeta matches the brute-force double loop") {
  const ResidueSet l5 = power_residues(5, 2);
  const SpacingProfile prof = SpacingProfile::from(l5);
  for (std::size_t l = 1; l <= 2; ++l)
    for (int n = 0; n <= 8; ++n) CHECK(zeta(prof, l, rat(n, 4)) == brute_zeta(l5, l, rat(n, 4)));

  // singleton set: zeta is 0/1 by the direct formula
  const ResidueSet single = from_elems({3}, 9);
  const SpacingProfile sp = SpacingProfile::from(single);
  CHECK(zeta(sp, 1, rat(1, 4)) == brute_zeta(single, 1, rat(1, 4)));

  std::mt19937_64 rng(2024);
  for (int rep = 0; rep < 10; ++rep) {
    const ResidueSet lam = random_increasing_set(rng, 12);
    const SpacingProfile p = SpacingProfile::from(lam);
    for (std::size_t l = 1; l <= lam.size(); l += 3)
      REQUIRE(zeta(p, l, rat(1, 2)) == brute_zeta(lam, l, rat(1, 2)));
  }
}

TEST_CASE("zeta is nonincreasing in theta") {
  const SpacingProfile prof = SpacingProfile::from(power_residues(65, 2));
  for (std::size_t l = 1; l <= 12; ++l) {
    Rat prev = rat(2);
    for (int n = 1; n <= 8; ++n) {
      const Rat v = zeta(prof, l, rat(n, 8));
      CHECK(v <= prev);
      prev = v;
    }
  }
}

TEST_CASE("gap-statistics inequality holds on random sets and residue sets") {
  std::mt19937_64 rng(7);
  std::vector<Rat> thetas;
  for (int i = 1; i <= 8; ++i) thetas.push_back(rat(i, 8));
  for (int rep = 0; rep < 100; ++rep) {
    const int len = 3 + static_cast<int>(rng() % 40);
    const ResidueSet lam = random_increasing_set(rng, len);
    const ZetaTable table(SpacingProfile::from(lam));
    for (const Rat& th : thetas)
      for (int J : {5, 8}) REQUIRE(table.check(th, rat(J)).pass);
  }
  // degenerate two-point set
  const ResidueSet two = from_elems({0, 3}, 11);
  CHECK(poisson_lemma_check(SpacingProfile::from(two), rat(1, 4), rat(8)).pass);

  const ZetaTable big(SpacingProfile::from(power_residues(5 * 13 * 17, 2)));
  CHECK(big.check(rat(1, 4), rat(8)).pass);
}

TEST_CASE("earth count agrees with the brute-force triple loop") {
  auto brute = [](const ResidueSet& lam, const Rat& gamma) {
    const i64 q = lam.modulus;
    const Rat gs = gamma * lam.mean_spacing();
    i64 cnt = 0;
    for (i64 u : lam.elements)
      for (i64 v : lam.elements) {
        bool ok = true;
        for (i64 w : lam.elements) {
          i64 d = ((u - v - w) % q + q) % q;
          d = std::min(d, q - d);
          if (!(rat_of(d) > gs)) {
            ok = false;
            break;
          }
        }
        if (ok) ++cnt;
      }
    return cnt;
  };
  const ResidueSet l5 = power_residues(5, 2);
  CHECK(condition_earth_count(l5, rat(1, 8)) == brute(l5, rat(1, 8)));
  const ResidueSet l65 = power_residues(65, 2);
  for (int n = 1; n <= 3; ++n)
    CHECK(condition_earth_count(l65, rat(n, 8)) == brute(l65, rat(n, 8)));

  // single-point set: the lone pair has u-v = 0 at distance 0 from w = 0
  const ResidueSet single = from_elems({0}, 7);
  CHECK(condition_earth_count(single, rat(1, 8)) == 0);

  CHECK(condition_earth_count(l65, rat(1, 16)) <=
        static_cast<i64>(l65.size() * l65.size()));
}

TEST_CASE("wine epsilon") {
  const ResidueSet l5 = power_residues(5, 2);
  CHECK(condition_wine_epsilon(l5, rat(1, 2)) == rat(1, 10));
  for (i64 q : {15, 65, 1105}) {
    ResidueSet lam = power_residues(q, 2);
    for (int n = 1; n < 4; ++n) CHECK(condition_wine_epsilon(lam, rat(n, 4)) >= 0);
  }
  // frozen oracle value for q = 5*13*17*29 at gamma = 1/4:
  // |Lambda^gamma| = 6419, so eps = 1/4 - 6419/32045 = 6369/128180.
  // At this single modulus the value sits far above alpha*gamma for any
  // alpha <= 1/32; the liminf statement only bites along deeper chains.
  const ResidueSet big = power_residues(32045, 2);
  CHECK(condition_wine_epsilon(big, rat(1, 4)) == rat(6369, 128180));
  const auto wine = report_wine(big, rat(1, 4), rat(1, 8));
  CHECK(wine.pass);
  CHECK(wine.epsilon_gamma == rat(6369, 128180));
}

TEST_CASE("earth report at the build modulus") {
  const ResidueSet lam = power_residues(1155, 2);
  const auto rep = report_earth(lam, rat(1, 4), rat(1, 32));
  CHECK(rep.values[0] == rat_of(466));  // frozen: brute-force pair scan
  CHECK(rep.threshold == rat(4500, 32));
  CHECK(rep.pass);
}
