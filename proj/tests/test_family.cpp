#include <doctest.h>

#include <algorithm>
#include <map>

#include "subavg/family.hpp"
#include "subavg/verify.hpp"

using namespace subavg;

namespace {

// Independent oracle for Y_{n,gamma,alpha}: enumerate a dyadic grid of the
// n relevant coordinates and evaluate the defining formula pointwise.
// With gamma and alpha*gamma of denominator dividing `res`, every event
// boundary sits on the grid, so each cell carries constant value and the
// histogram is exact.
std::map<Rat, Rat> grid_y_distribution(int n, const Rat& gamma, const Rat& alpha) {
  i64 res = 1;
  while (Rat(gamma * rat_of(res)).get_den() != 1 ||
         Rat(alpha * gamma * rat_of(res)).get_den() != 1)
    res *= 2;
  const i64 g_cut = to_i64(Int(Rat(gamma * rat_of(res)).get_num()));
  const i64 ag_cut = to_i64(Int(Rat(alpha * gamma * rat_of(res)).get_num()));
  const Rat inv = Rat(1) / (1 - gamma);
  Rat cell_mass(1);
  for (int k = 0; k < n; ++k) cell_mass /= rat_of(res);

  std::map<Rat, Rat> hist;
  std::vector<i64> cell(static_cast<std::size_t>(n), 0);
  while (true) {
    Rat v(1);
    for (int k = 0; k < n; ++k) {
      const i64 c = cell[static_cast<std::size_t>(k)];
      if (c >= g_cut)
        v *= inv;  // x in [gamma, 1)
      else if (c < ag_cut)
        v = alpha;  // x in [0, alpha gamma)
      else
        v = 0;
    }
    hist[v] += cell_mass;
    int k = 0;
    while (k < n && ++cell[static_cast<std::size_t>(k)] == res) {
      cell[static_cast<std::size_t>(k)] = 0;
      ++k;
    }
    if (k == n) break;
  }
  return hist;
}

StepParams micro_params() {
  StepParams p;
  p.K = 1;
  p.M = 1;
  p.L = 0;
  p.gamma = rat(1, 4);
  p.alpha = rat(1, 32);
  p.beta = rat(2, 5);
  p.delta = rat(3, 4);
  p.epsilon = rat(1, 8);
  p.A = 1;
  p.D = 1;
  return p;
}

BuildConfig micro_config() {
  BuildConfig cfg;
  cfg.K = 1;
  cfg.M = 1;
  cfg.params = micro_params();
  cfg.pools.p_pool = {13};
  cfg.pools.q_pool = {105};
  cfg.seq = SequenceSpec{SeqKind::kPower, 2};
  cfg.seed = 42;
  return cfg;
}

}  // namespace

TEST_CASE("y_distribution base case and one unrolling") {
  const YDistribution y0 = y_distribution(0, rat(1, 4), rat(1, 32));
  REQUIRE(y0.atoms.size() == 1);
  CHECK(y0.atoms[0] == std::pair<Rat, Rat>{rat(1), rat(1)});

  // gamma = alpha = 1/2: atoms 2 wp 1/2, alpha wp alpha*gamma = 1/4,
  // 0 wp gamma(1-alpha) = 1/4; mean 1 + alpha^2 gamma = 9/8
  const YDistribution y1 = y_distribution(1, rat(1, 2), rat(1, 2));
  std::map<Rat, Rat> atoms(y1.atoms.begin(), y1.atoms.end());
  CHECK(atoms.at(rat(2)) == rat(1, 2));
  CHECK(atoms.at(rat(1, 2)) == rat(1, 4));
  CHECK(atoms.at(rat(0)) == rat(1, 4));
  CHECK(y1.mean() == rat(9, 8));
}

TEST_CASE("y_distribution matches the grid-enumeration oracle") {
  for (int n : {1, 2, 3}) {
    for (auto [g, a] : {std::pair{rat(1, 2), rat(1, 2)}, {rat(1, 4), rat(1, 4)}}) {
      const YDistribution y = y_distribution(n, g, a);
      const auto grid = grid_y_distribution(n, g, a);
      REQUIRE(grid.size() == y.atoms.size());
      for (const auto& [v, p] : y.atoms) REQUIRE(grid.at(v) == p);
    }
  }
}

TEST_CASE("y_distribution exactness sweep (n <= 8)") {
  for (const Rat& g : {rat(1, 4), rat(1, 2)}) {
    for (const Rat& a : {rat(1, 4), rat(1, 32)}) {
      for (i64 n = 0; n <= 8; ++n) {
        const YDistribution y = y_distribution(n, g, a);
        REQUIRE(y.probability_sum() == rat(1));
        REQUIRE(y.mean() == 1 + rat_of(n) * a * a * g);
        Rat bound = rat(2);
        for (i64 i = 0; i < n; ++i) bound /= (1 - g);
        REQUIRE(y.mean_square() <= bound);
        // atoms are dyadic multiples of powers of (1-g)^{-1}
        for (const auto& [v, p] : y.atoms) {
          REQUIRE(p > 0);
          Rat w = v;
          for (i64 i = 0; i <= n && !is_dyadic(w); ++i) w *= (1 - g);
          REQUIRE(is_dyadic(w));
        }
      }
    }
  }
}

TEST_CASE("trivial family verifies") {
  const Family fam = trivial_step_family(micro_params());
  CHECK(fam.T == 1);
  CHECK(fam.R == 1);
  CHECK(fam.f[0].mean() == rat(1));
  CHECK(fam.X[0].at(0) == rat(1));

  QsetCatalog pools;
  pools.p_pool = {13};
  pools.q_pool = {105};
  SequenceSpec sq{SeqKind::kPower, 2};
  PsiOracle psi(sq, pools, rat(2, 5), 2000, SubsetRule{});
  const auto rep = verify_family(fam, sq, psi);
  CHECK(rep.pass);

  // its X distribution is Y_0
  const auto dist = fam.X[0].distribution(100);
  REQUIRE(dist.size() == 1);
  CHECK(dist[0].first == rat(1));
}

TEST_CASE("extend appends constants and keeps verification green") {
  // extension applies to a family at L = M
  StepParams params = micro_params();
  params.M = 0;
  const Family base = trivial_step_family(params);
  const Family ext = extend_family(base);
  CHECK(ext.params.K == 2);
  CHECK(ext.f.size() == 2);
  CHECK(ext.f[1].mean() == rat(1));
  CHECK(ext.X[1].at(5) == rat(1));

  QsetCatalog pools;
  pools.p_pool = {13};
  pools.q_pool = {105};
  SequenceSpec sq{SeqKind::kPower, 2};
  PsiOracle psi(sq, pools, rat(2, 5), 2000, SubsetRule{});
  CHECK(verify_family(ext, sq, psi).pass);
}

TEST_CASE("partition selection on q = 105") {
  const ResidueSet lam = power_residues(105, 2);
  StepParams params = micro_params();
  SelectOutcome sel = select_partition_sets(lam, params);
  REQUIRE(sel.ok);
  const PartitionSets& ps = sel.parts;

  // stated invariants
  CHECK(rat_of(static_cast<i64>(ps.phi.size())) >=
        3 * params.alpha * rat_of(static_cast<i64>(lam.size())));
  CHECK(ps.p_psi() >= params.alpha * params.gamma);
  const Rat p_lam_gamma =
      rat_of(static_cast<i64>(thicken(lam, params.gamma).size()), 105);
  CHECK(ps.p_delta() < 1 - p_lam_gamma + params.delta / 8);
  CHECK(gcd_i64(static_cast<i64>(ps.psi_set.size()), params.D) == 1);
  CHECK(gcd_i64(ps.delta_size, params.D) == 1);
  CHECK(gcd_i64(ps.r, params.D) == 1);

  // Psi inside Phi^gamma, disjoint from Delta; complement covered
  for (i64 x : ps.psi_set) {
    CHECK(std::binary_search(ps.phi_gamma.begin(), ps.phi_gamma.end(), x));
    CHECK(!ps.in_delta(x));
  }
  const auto neg_gamma = thicken(negate(lam), params.gamma);
  std::vector<std::uint8_t> in_ng(105, 0);
  for (i64 x : neg_gamma) in_ng[static_cast<std::size_t>(x)] = 1;
  for (i64 x = 0; x < 105; ++x)
    if (!in_ng[static_cast<std::size_t>(x)]) CHECK(ps.in_delta(x));

  // (soul): s/r and t/r reproduce the exact ratios
  CHECK(rat_of(ps.s, ps.r) == (1 - params.gamma) / ps.p_delta());
  CHECK(rat_of(ps.t, ps.r) == params.alpha * params.gamma / ps.p_psi());

  // (falsely), brute force
  for (i64 x : ps.psi_set) {
    i64 cnt = 0;
    for (i64 v : lam.elements)
      if (ps.in_delta(x + v)) ++cnt;
    CHECK(rat_of(cnt) >= 2 * params.alpha * rat_of(static_cast<i64>(lam.size())));
  }
}

TEST_CASE("micro build (1,1,1) end to end") {
  BuildConfig cfg = micro_config();
  cfg.keep_intermediates = true;
  const BuildResult res = build_family(cfg);
  REQUIRE_MESSAGE(res.ok, res.error);
  const Family& fam = res.family;
  CHECK(fam.T == 1365);
  CHECK(fam.params.L == 1);

  PsiOracle psi(cfg.seq, cfg.pools, cfg.params.beta, cfg.params.scan_horizon,
                cfg.params.S);
  const auto rep = verify_family(fam, cfg.seq, psi);
  for (const auto& c : rep.checks) {
    CAPTURE(c.name);
    CAPTURE(c.detail);
    CHECK(c.pass);
  }

  // distribution is exactly Y_1
  const auto dist = fam.X[0].distribution(fam.params.rt_cap);
  const YDistribution y1 = y_distribution(1, cfg.params.gamma, cfg.params.alpha);
  REQUIRE(dist.size() == y1.atoms.size());
  for (std::size_t i = 0; i < dist.size(); ++i) {
    CHECK(dist[i].first == y1.atoms[i].first);
    CHECK(dist[i].second == y1.atoms[i].second);
  }

  // growl per step: E f within [E f_prev, (1+4 eps) E f_prev]
  const Rat ef = fam.f[0].mean();
  CHECK(ef >= 1);
  CHECK(ef <= (1 + 4 * cfg.params.epsilon));

  REQUIRE(res.log["steps"].size() == 1);

  // serialization round trip
  const auto blob = family_to_cbor(fam, res.log);
  nlohmann::json log2;
  const Family fam2 = family_from_cbor(blob, &log2);
  CHECK(fam2.T == fam.T);
  CHECK(fam2.R == fam.R);
  CHECK(fam2.E == fam.E);
  CHECK(fam2.q_values == fam.q_values);
  for (i64 x = 0; x < fam.T; ++x) REQUIRE(fam2.f[0].at(x) == fam.f[0].at(x));
  for (i64 x = 0; x < 500; ++x) REQUIRE(fam2.X[0].at(x) == fam.X[0].at(x));
  CHECK(verify_family(fam2, cfg.seq, psi).pass);
}

TEST_CASE("fate_check") {
  // constant alpha function passes; zero fails
  const ResidueSet lam = power_residues(105, 2);
  const PeriodicFunction falpha = PeriodicFunction::constant(rat(1, 32), 105);
  const PeriodicFunction fzero = PeriodicFunction::constant(rat(0), 105);
  CHECK(fate_check(falpha, {1, 2}, 105, lam, rat(1, 32)));
  CHECK(!fate_check(fzero, {1, 2}, 105, lam, rat(1, 32)));
}

TEST_CASE("restriction of the trivial family") {
  StepParams params = micro_params();
  params.A = 455;  // q*B
  const Family triv = trivial_step_family(params);

  const ResidueSet lam65 = power_residues(65, 2);
  QsetCatalog pools;
  pools.p_pool = {7};
  pools.q_pool = {65};
  SequenceSpec sq{SeqKind::kPower, 2};
  PsiOracle psi(sq, pools, rat(2, 5), 5000, SubsetRule{});

  const RestrictedFamily res = restrict_family(triv, lam65, 7, psi);
  CHECK(res.barred.T == 455);
  CHECK(res.barred.params.A == 1);

  // f-bar = |Lambda_65| 1_{Xi}, mean = gamma' <= gamma
  const Rat ef = res.barred.f[0].mean();
  CHECK(ef == rat_of(static_cast<i64>(lam65.size())) *
                  rat_of(static_cast<i64>(res.xi_gamma.size()), 65));
  CHECK(ef <= params.gamma);

  // the Lemma chain with f = 1: the Lambda_{455}-average from any point of
  // (-Lambda_65)^gamma is >= 1
  const ResidueSet lam455 = power_residues(455, 2);
  for (i64 u : res.neg_gamma) {
    for (i64 lift = 0; lift < 455; lift += 65) {
      const i64 x = u + lift;
      if (x >= 455) break;
      if ((x % 65) != u) continue;
      const Rat avg = residue_average(res.barred.f[0], lam455, x);
      REQUIRE(avg >= 1);
    }
  }

  // E-bar is contained in (-Lambda)^gamma (here: empty)
  CHECK(res.barred.e_measure() == 0);

  // (1bar)-(4bar) with three distinct q-periodic sigma sets
  std::vector<std::vector<i64>> sigmas;
  sigmas.push_back(res.neg_gamma);
  sigmas.push_back({res.neg_gamma[0]});
  sigmas.push_back(std::vector<i64>(res.neg_gamma.begin(),
                                    res.neg_gamma.begin() + res.neg_gamma.size() / 2));
  const auto rep = verify_restriction(triv, res, lam65, sigmas, sq, psi);
  for (const auto& c : rep.checks) {
    CAPTURE(c.name);
    CAPTURE(c.detail);
    CHECK(c.pass);
  }

  // preconditions
  CHECK_THROWS(restrict_family(triv, lam65, 13 * 7, psi));  // qB > A
}

TEST_CASE("build failure is structured, not silent") {
  BuildConfig cfg = micro_config();
  cfg.params.delta = rat(1, 64);  // guard windows cannot fit this budget
  cfg.params.epsilon = rat(1, 8);
  const BuildResult res = build_family(cfg);
  CHECK(!res.ok);
  CHECK(!res.error.empty());
  CHECK(res.log.contains("failure"));
}
