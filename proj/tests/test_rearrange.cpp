#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>

#include "subavg/rearrange.hpp"

using namespace subavg;

namespace {

RearrangementPlan make_plan(i64 T, i64 p, std::vector<i64> shifts) {
  RearrangementPlan plan;
  plan.T = T;
  plan.p = p;
  plan.shifts = std::move(shifts);
  plan.validate();
  return plan;
}

PeriodicFunction indicator_of_zero(i64 T) {
  return PeriodicFunction::scaled_indicator(Rat(1), {0}, T);
}

}  // namespace

TEST_CASE("identity shifts reproduce the periodic extension") {
  const PeriodicFunction f = indicator_of_zero(3);
  const auto plan = make_plan(3, 10, {0, 0, 0});
  const PeriodicFunction g = apply_rearrangement(f, plan);
  CHECK(g.period() == 30);
  for (i64 x = 0; x < 30; ++x) CHECK(g.at(x) == f.at(x));
}

TEST_CASE("hand-evaluated block shifts for T=2, p=5") {
  const PeriodicFunction f = indicator_of_zero(2);
  const auto plan = make_plan(2, 5, {1, 0});
  // blocks [0,4) shifted by 1, [4,8) unshifted, tail [8,10) unshifted
  const PeriodicFunction g = apply_rearrangement(f, plan);
  std::vector<i64> support;
  for (i64 x = 0; x < 10; ++x)
    if (g.at(x) == 1) support.push_back(x);
  CHECK(support == std::vector<i64>{1, 3, 4, 6, 8});
  CHECK(g.mean() == f.mean());

  const auto set = rearranged_set({0}, plan);
  CHECK(set == support);
  CHECK(rat_of(static_cast<i64>(set.size()), 10) == rat(1, 2));
}

TEST_CASE("rearranged set edge cases") {
  const auto plan = make_plan(2, 5, {1, 0});
  CHECK(rearranged_set({}, plan).empty());
  const auto all = rearranged_set({0, 1}, plan);
  CHECK(all.size() == 10);
}

TEST_CASE("mean and joint distribution preservation") {
  std::mt19937_64 rng(99);
  for (int rep = 0; rep < 20; ++rep) {
    const i64 T = 2 + static_cast<i64>(rng() % 6);
    const i64 p = 11 + 2 * static_cast<i64>(rng() % 20);
    if (gcd_i64(p, T) != 1) continue;
    const i64 root = isqrt_i64(p);
    std::vector<i64> shifts(static_cast<std::size_t>(root));
    for (auto& s : shifts) s = static_cast<i64>(rng() % static_cast<std::uint64_t>(T));
    const auto plan = make_plan(T, p, shifts);

    std::vector<Rat> va, vb;
    for (i64 x = 0; x < T; ++x) {
      va.push_back(rat_of(static_cast<i64>(rng() % 5)));
      vb.push_back(rat_of(static_cast<i64>(rng() % 3)));
    }
    const PeriodicFunction fa = PeriodicFunction::from_values(va);
    const PeriodicFunction fb = PeriodicFunction::from_values(vb);
    const PeriodicFunction ga = apply_rearrangement(fa, plan);
    const PeriodicFunction gb = apply_rearrangement(fb, plan);

    // joint histogram over Z_pT equals p times the joint histogram over Z_T
    std::map<std::pair<Rat, Rat>, i64> before, after;
    for (i64 x = 0; x < T; ++x) ++before[{fa.at(x), fb.at(x)}];
    for (i64 x = 0; x < p * T; ++x) ++after[{ga.at(x), gb.at(x)}];
    REQUIRE(before.size() == after.size());
    for (const auto& [k, c] : before) REQUIRE(after.at(k) == p * c);
  }
}

TEST_CASE("linearity and positivity of the rearrangement") {
  const auto plan = make_plan(3, 11, {2, 0, 1});
  std::vector<Rat> va{rat(1), rat(0), rat(2)}, vb{rat(1, 2), rat(3), rat(0)};
  const PeriodicFunction fa = PeriodicFunction::from_values(va);
  const PeriodicFunction fb = PeriodicFunction::from_values(vb);
  std::vector<Rat> vsum;
  for (i64 x = 0; x < 3; ++x) vsum.push_back(fa.at(x) + fb.at(x));
  const PeriodicFunction fsum = PeriodicFunction::from_values(vsum);
  const PeriodicFunction ga = apply_rearrangement(fa, plan);
  const PeriodicFunction gb = apply_rearrangement(fb, plan);
  const PeriodicFunction gsum = apply_rearrangement(fsum, plan);
  for (i64 x = 0; x < 33; ++x) {
    CHECK(gsum.at(x) == ga.at(x) + gb.at(x));
    CHECK(ga.at(x) >= 0);
  }
}

TEST_CASE("shift locality inside a block") {
  const auto plan = make_plan(4, 29, {3, 1, 0, 2, 1});
  std::vector<Rat> vals{rat(1), rat(2), rat(3), rat(4)};
  const PeriodicFunction f = PeriodicFunction::from_values(vals);
  const PeriodicFunction g = apply_rearrangement(f, plan);
  // within one block, g(x+z) = f(xtilde + z) for the single shifted origin
  const i64 bl = plan.block_len();
  for (i64 i = 0; i < plan.root(); ++i) {
    const i64 x = i * bl;
    const i64 xt = x + plan.shifts[static_cast<std::size_t>(i)];
    for (i64 z = 0; z < bl; ++z) REQUIRE(g.at(x + z) == f.at(xt + z));
  }
}

TEST_CASE("exceptional set E1 structure and measure bound") {
  // T=2, p=25, E empty, guard 2: five windows of three points each
  const auto plan = make_plan(2, 25, {0, 1, 0, 1, 1});
  const auto e1 = exceptional_E1({}, plan, 2);
  CHECK(e1.size() == 15);
  std::vector<i64> expected;
  for (i64 b : {0, 10, 20, 30, 40})
    for (i64 y = b - 2; y <= b; ++y) expected.push_back(((y % 50) + 50) % 50);
  std::sort(expected.begin(), expected.end());
  CHECK(e1 == expected);

  // guard 0: rearranged set plus boundary points only
  const auto plan2 = make_plan(2, 5, {1, 0});
  const auto e0 = exceptional_E1({}, plan2, 0);
  CHECK(e0 == std::vector<i64>{0, 4, 8});  // boundaries 4, 8 and the wrap at 0

  // measure bound P(E1) <= P(E) + (guard + 2T)/(T sqrt p), exact instances
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 10; ++rep) {
    const i64 T = 3;
    const i64 p = 101;
    std::vector<i64> shifts(10);
    for (auto& s : shifts) s = static_cast<i64>(rng() % 3);
    const auto pl = make_plan(T, p, shifts);
    std::vector<i64> e_set;
    for (i64 x = 0; x < T; ++x)
      if (rng() % 3 == 0) e_set.push_back(x);
    const i64 guard = static_cast<i64>(rng() % 5);
    const auto e1r = exceptional_E1(e_set, pl, guard);
    const Rat lhs = rat_of(static_cast<i64>(e1r.size()), p * T);
    const Rat rhs = rat_of(static_cast<i64>(e_set.size()), T) +
                    rat_of(guard + 2 * T) / (rat_of(T) * rat_of(isqrt_i64(p)));
    REQUIRE(lhs <= rhs);
  }
}

TEST_CASE("certified omega search") {
  SequenceSpec sq{SeqKind::kPower, 2};

  // T = 1 is trivially satisfied by any plan
  const ResidueSet lam7 = admissible_residues(sq, 7);
  const OmegaSearch triv = find_good_omega(1, 7, lam7, 1, 10);
  CHECK(triv.found);
  CHECK(triv.candidates_tried == 1);

  // T=3, p=101: a passing plan within budget, then re-verify it by hand
  const ResidueSet lam303 = admissible_residues(sq, 303);
  const OmegaSearch res = find_good_omega(3, 101, lam303, 12345, 10000);
  REQUIRE(res.found);
  const i64 nl = static_cast<i64>(lam303.size());
  for (i64 x = 0; x < 303; ++x) {
    for (i64 b = 0; b < 3; ++b) {
      i64 cnt = 0;
      for (i64 a : lam303.elements) {
        const i64 shift = (a == 0) ? 303 : a;
        const i64 z = (x + shift) % 303;
        if (res.plan.warp(z) % 3 == b) ++cnt;
      }
      REQUIRE(2 * 3 * cnt >= nl);
    }
  }

  // |Lambda_pT| < 2T is rejected up front
  ResidueSet tiny;
  tiny.modulus = 3 * 5;
  tiny.elements = {1, 2};
  CHECK_THROWS(find_good_omega(5, 3, tiny, 1, 10));
}
