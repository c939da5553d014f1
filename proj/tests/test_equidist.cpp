#include <doctest.h>

#include "subavg/equidist.hpp"

using namespace subavg;

TEST_CASE("residue counts for the primes mod 3") {
  SequenceSpec pr{SeqKind::kPrime, 2};
  auto counts = residue_counts(pr, 3, 20);
  // primes 7,13,19,31,37,43,61,67 land in class 1 among the first twenty
  CHECK(counts.at(1) == 8);
  CHECK(counts.at(2) == 11);  // 2,5,11,17,23,29,41,47,53,59,71
}

TEST_CASE("residue counts, trivial and square cases") {
  SequenceSpec sq{SeqKind::kPower, 2};
  auto c1 = residue_counts(sq, 1, 7);
  CHECK(c1.at(0) == 7);

  auto c5 = residue_counts(sq, 5, 10);
  // k^2 mod 5 for k=1..10: 1,4,4,1,0,1,4,4,1,0
  CHECK(c5.at(1) == 4);
  CHECK(c5.at(4) == 4);
}

TEST_CASE("empirical_N basics") {
  SequenceSpec sq{SeqKind::kPower, 2};
  // Q = 1: every k counts, threshold beta*N < N, no failures
  CHECK(empirical_N(sq, 1, rat(2, 5), 100) == 0);

  // frozen oracle values (event-driven window scan, beta = 2/5)
  CHECK(empirical_N(sq, 15, rat(2, 5), 2000) == 10);
  CHECK(empirical_N(sq, 5, rat(2, 5), 500) == 1);

  // monotone in beta
  bool st = true;
  const i64 lo = empirical_N(sq, 65, rat(1, 5), 5000, &st);
  const i64 hi = empirical_N(sq, 65, rat(3, 5), 5000, &st);
  CHECK(lo <= hi);

  SequenceSpec pr{SeqKind::kPrime, 2};
  bool stable = false;
  const i64 n3 = empirical_N(pr, 3, rat(2, 5), 10000, &stable);
  CHECK(stable);
  CHECK(n3 > 0);
  CHECK(n3 < 5000);
}

TEST_CASE("per-class threshold restated on the scanned range") {
  // for every a and N beyond the horizon value, count(a, N) > beta N/|Lambda|
  SequenceSpec pr{SeqKind::kPrime, 2};
  const Rat beta = rat(2, 5);
  const i64 H = 4000;
  const EquidistScan scan = scan_equidistribution(pr, 15, beta, H);
  REQUIRE(scan.stabilized);
  const i64 n0 = scan.empirical_n;
  // re-scan counts at a few checkpoints past n0 with a direct pass
  for (i64 checkpoint : {n0 + 1, n0 + 7, H / 2, H}) {
    auto counts = residue_counts(pr, 15, checkpoint);
    for (const auto& [a, c] : counts)
      REQUIRE(rat_of(c) > beta * rat_of(checkpoint) / rat_of(8));
  }
}

TEST_CASE("psi") {
  SequenceSpec sq{SeqKind::kPower, 2};
  QsetCatalog pools;
  pools.p_pool = {149};
  pools.q_pool = {1155};
  SubsetRule all;
  PsiOracle psi(sq, pools, rat(2, 5), 3000, all);

  // below every pool member only Q = 1 qualifies
  CHECK(psi.psi(1) == 1);
  CHECK(psi.psi(148) == 1);

  // powers of two: inf of S above the worst horizon
  SubsetRule pow2{SubsetRule::Kind::kPowersOfTwo};
  PsiOracle psi2(sq, pools, rat(2, 5), 3000, pow2);
  const i64 v = psi2.psi(149);  // worst is N(149)
  CHECK((v & (v - 1)) == 0);
  CHECK(v > psi2.cached_N(149));
  CHECK(v / 2 <= psi2.cached_N(149));

  // composition over a two-member catalog of primes
  SequenceSpec pr{SeqKind::kPrime, 2};
  QsetCatalog pq;
  pq.p_pool = {3};
  pq.q_pool = {5};
  PsiOracle psi3(pr, pq, rat(2, 5), 10000, all);
  const i64 got = psi3.psi(15);
  CHECK(got > psi3.cached_N(3));
  CHECK(got > psi3.cached_N(5));
  CHECK(got > psi3.cached_N(15));
  CHECK(got == std::max({psi3.cached_N(3), psi3.cached_N(5), psi3.cached_N(15)}) + 1);

  // nondecreasing in n
  i64 prev = 0;
  for (i64 n : {1, 2, 3, 4, 5, 14, 15, 40}) {
    const i64 cur = psi3.psi(n);
    CHECK(cur >= prev);
    prev = cur;
  }
}
