#include "subavg/family.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

namespace subavg {

Rat YDistribution::mean() const {
  Rat acc(0);
  for (const auto& [v, p] : atoms) acc += v * p;
  return acc;
}

Rat YDistribution::mean_square() const {
  Rat acc(0);
  for (const auto& [v, p] : atoms) acc += v * v * p;
  return acc;
}

Rat YDistribution::probability_sum() const {
  Rat acc(0);
  for (const auto& [v, p] : atoms) acc += p;
  return acc;
}

YDistribution y_distribution(i64 n, const Rat& gamma, const Rat& alpha) {
  if (gamma <= 0 || gamma >= 1 || alpha <= 0 || alpha >= 1)
    throw std::invalid_argument("y_distribution: gamma, alpha must be in (0,1)");
  if (!is_dyadic(gamma) || !is_dyadic(alpha))
    throw std::invalid_argument("y_distribution: gamma, alpha must be dyadic");
  std::map<Rat, Rat> atoms;
  atoms[Rat(1)] = Rat(1);
  const Rat inv = Rat(1) / (1 - gamma);
  for (i64 step = 0; step < n; ++step) {
    std::map<Rat, Rat> next;
    for (const auto& [v, p] : atoms) next[v * inv] += p * (1 - gamma);
    next[alpha] += alpha * gamma;
    next[Rat(0)] += gamma * (1 - alpha);
    atoms = std::move(next);
  }
  YDistribution out;
  out.n = n;
  out.gamma = gamma;
  out.alpha = alpha;
  out.atoms.assign(atoms.begin(), atoms.end());
  return out;
}

void StepParams::validate() const {
  if (K < 0 || M < 0 || L < 0 || L > M)
    throw std::invalid_argument("StepParams: need 0 <= L <= M and K >= 0");
  if (gamma <= 0 || gamma >= gamma0)
    throw std::invalid_argument("StepParams: gamma must be in (0, gamma0)");
  if (alpha <= 0 || alpha >= 1) throw std::invalid_argument("StepParams: alpha in (0,1)");
  if (!is_dyadic(gamma) || !is_dyadic(alpha))
    throw std::invalid_argument("StepParams: gamma and alpha must be dyadic rationals");
  if (beta <= 0 || beta >= 1) throw std::invalid_argument("StepParams: beta in (0,1)");
  if (delta <= 0 || !(delta < 8 * epsilon))
    throw std::invalid_argument("StepParams: need 0 < delta < 8*epsilon");
  if (A < 1) throw std::invalid_argument("StepParams: A >= 1");
  if (D < 1 || D % 2 == 0) throw std::invalid_argument("StepParams: D must be odd");
}

nlohmann::json StepParams::to_json() const {
  nlohmann::json j;
  j["K"] = K;
  j["M"] = M;
  j["L"] = L;
  j["gamma"] = rat_str(gamma);
  j["alpha"] = rat_str(alpha);
  j["beta"] = rat_str(beta);
  j["delta"] = rat_str(delta);
  j["epsilon"] = rat_str(epsilon);
  j["A"] = A;
  j["D"] = D;
  j["C"] = rat_str(C);
  j["S"] = (S.kind == SubsetRule::Kind::kAllIntegers) ? "all" : "pow2";
  j["gamma0"] = rat_str(gamma0);
  j["t_cap"] = t_cap;
  j["rt_cap"] = rt_cap;
  j["scan_horizon"] = scan_horizon;
  return j;
}

StepParams StepParams::from_json(const nlohmann::json& j) {
  StepParams p;
  p.K = j.at("K").get<int>();
  p.M = j.at("M").get<int>();
  p.L = j.at("L").get<int>();
  p.gamma = parse_rat(j.at("gamma").get<std::string>());
  p.alpha = parse_rat(j.at("alpha").get<std::string>());
  p.beta = parse_rat(j.at("beta").get<std::string>());
  p.delta = parse_rat(j.at("delta").get<std::string>());
  p.epsilon = parse_rat(j.at("epsilon").get<std::string>());
  p.A = j.at("A").get<i64>();
  p.D = j.at("D").get<i64>();
  p.C = parse_rat(j.at("C").get<std::string>());
  p.S.kind = j.at("S").get<std::string>() == "pow2" ? SubsetRule::Kind::kPowersOfTwo
                                                    : SubsetRule::Kind::kAllIntegers;
  p.gamma0 = parse_rat(j.at("gamma0").get<std::string>());
  p.t_cap = j.at("t_cap").get<i64>();
  p.rt_cap = j.at("rt_cap").get<i64>();
  p.scan_horizon = j.at("scan_horizon").get<i64>();
  return p;
}

Rat Family::e_measure() const {
  i64 cnt = 0;
  for (std::uint8_t b : E) cnt += b;
  return rat_of(cnt, T);
}

void Family::validate_structure() const {
  if (T < 1 || R < 1) throw std::invalid_argument("Family: T,R >= 1");
  if (static_cast<int>(f.size()) != params.K || static_cast<int>(X.size()) != params.K)
    throw std::invalid_argument("Family: need K functions");
  if (static_cast<i64>(E.size()) != T || static_cast<i64>(q_idx.size()) != T)
    throw std::invalid_argument("Family: E and Q_x must cover Z_T");
  if (gcd_i64(T, params.D) != 1 || gcd_i64(R, params.D) != 1)
    throw std::invalid_argument("Family: T and R must be coprime to D");
  for (i64 v : q_values)
    if (v < 1 || T % v != 0)
      throw std::invalid_argument("Family: Q_x values must divide T");
  for (const auto& fn : f)
    if (T % fn.period() != 0)
      throw std::invalid_argument("Family: f period must divide T");
}

Family trivial_step_family(const StepParams& params) {
  StepParams p = params;
  p.K = 1;
  p.L = 0;
  p.validate();
  Family fam;
  fam.params = p;
  fam.T = 1;
  fam.R = 1;
  fam.f = {PeriodicFunction::constant(Rat(1), 1)};
  fam.X = {XFunction::constant(Rat(1))};
  fam.E = {0};
  fam.q_values = {1};
  fam.q_idx = {0};
  fam.validate_structure();
  return fam;
}

Family extend_family(const Family& fam) {
  Family out = fam;
  out.params.K = fam.params.K + 1;
  out.params.L = 0;
  out.f.push_back(PeriodicFunction::constant(Rat(1), fam.T));
  XFunction xk = XFunction::constant(Rat(1));
  xk.set_period(fam.RT());
  out.X.push_back(xk);
  out.validate_structure();
  return out;
}

namespace {

// Reduced denominator of ratio/(count/q), i.e. of ratio * q / count.
i64 soul_denominator(const Rat& ratio, i64 q, i64 count) {
  Rat v = ratio * rat_of(q, count);
  return to_i64(Int(v.get_den()));
}

}  // namespace

SelectOutcome select_partition_sets(const ResidueSet& lam_q, const StepParams& params) {
  SelectOutcome out;
  const i64 q = lam_q.modulus;
  const Rat gamma = params.gamma, alpha = params.alpha;
  const ResidueSet neg = negate(lam_q);
  const std::vector<i64> neg_gamma = thicken(neg, gamma);
  const Rat gs = gamma * lam_q.mean_spacing();

  std::vector<std::uint8_t> in_neg_gamma(q, 0);
  for (i64 x : neg_gamma) in_neg_gamma[static_cast<std::size_t>(x)] = 1;

  PartitionSets ps;
  ps.q = q;

  // (alright): Phi_q = { u in -Lambda : #{v in Lambda : u+v outside the
  // open gs-neighbourhood of -Lambda} >= 2 alpha |Lambda| }
  const Rat phi_threshold = 2 * alpha * rat_of(static_cast<i64>(lam_q.size()));
  for (i64 u : neg.elements) {
    i64 cnt = 0;
    for (i64 v : lam_q.elements) {
      const i64 d = neg.min_circular_distance(u + v);
      if (rat_of(d) >= gs) ++cnt;
    }
    if (rat_of(cnt) >= phi_threshold) ps.phi.push_back(u);
  }
  if (rat_of(static_cast<i64>(ps.phi.size())) <
      3 * alpha * rat_of(static_cast<i64>(lam_q.size())))
    out.failures.push_back("(alright): |Phi_q| < 3 alpha |Lambda_q|");

  // Phi^gamma
  {
    const i64 m = thicken_offsets(lam_q, gamma);
    std::vector<std::uint8_t> seen(q, 0);
    for (i64 u : ps.phi)
      for (i64 j = 1; j <= m; ++j) seen[static_cast<std::size_t>((u + j) % q)] = 1;
    for (i64 x = 0; x < q; ++x)
      if (seen[static_cast<std::size_t>(x)]) ps.phi_gamma.push_back(x);
  }

  // Psi_q subset of Phi^gamma: smallest residues first, size chosen with
  // gcd(|Psi|,D)=1, P(Psi) >= alpha*gamma, minimizing the (soul) r.
  const Rat ag = alpha * gamma;
  const i64 psi_min = to_i64(rat_ceil(ag * rat_of(q)));
  const i64 psi_max = static_cast<i64>(ps.phi_gamma.size());
  if (psi_min > psi_max) {
    out.failures.push_back("(late): P(Phi_q^gamma) < alpha*gamma, no room for Psi_q");
  }

  // Delta_q = complement of (-Lambda)^gamma plus filler. Filler lives in
  // (-Lambda)^gamma away from Psi (and away from Phi^gamma when possible),
  // sized within the delta/8 budget.
  const i64 forced = q - static_cast<i64>(neg_gamma.size());
  const i64 budget = to_i64(rat_ceil(params.delta * rat_of(q, 8))) - 1;  // |F| < delta*q/8

  // candidate sizes: pick the pair (|Psi|, |Delta|) minimizing the common
  // (soul) denominator r. Denominators repeat heavily across sizes, so the
  // minimization runs over distinct denominators with the smallest size
  // kept per value.
  i64 best_r = -1;
  i64 best_psi = -1, best_delta = -1;
  if (psi_min <= psi_max) {
    std::map<i64, i64> psi_by_den, delta_by_den;  // denominator -> smallest size
    for (i64 npsi = psi_min; npsi <= psi_max; ++npsi) {
      if (gcd_i64(npsi, params.D) != 1) continue;
      const i64 dt = soul_denominator(ag, q, npsi);
      psi_by_den.emplace(dt, npsi);
    }
    for (i64 ndelta = forced; ndelta <= std::min(forced + budget, q - 1); ++ndelta) {
      if (gcd_i64(ndelta, params.D) != 1) continue;
      const i64 dsn = soul_denominator(1 - gamma, q, ndelta);
      delta_by_den.emplace(dsn, ndelta);
    }
    for (const auto& [dt, npsi] : psi_by_den) {
      for (const auto& [dsn, ndelta] : delta_by_den) {
        const i64 r = std::lcm(dsn, dt);
        if (best_r < 0 || r < best_r ||
            (r == best_r && (npsi < best_psi || (npsi == best_psi && ndelta < best_delta)))) {
          best_r = r;
          best_psi = npsi;
          best_delta = ndelta;
        }
      }
    }
  }
  if (best_r < 0) {
    if (out.failures.empty())
      out.failures.push_back("(minute): no admissible (|Psi|,|Delta|) sizes in budget");
    return out;
  }
  if (gcd_i64(best_r, params.D) != 1) {
    out.failures.push_back("(soul): gcd(r, D) != 1");
    return out;
  }

  ps.psi_set.assign(ps.phi_gamma.begin(), ps.phi_gamma.begin() + best_psi);
  std::vector<std::uint8_t> in_psi(q, 0);
  for (i64 x : ps.psi_set) in_psi[static_cast<std::size_t>(x)] = 1;

  // filler: prefer (-Lambda)^gamma positions outside Phi^gamma and Psi;
  // fall back to Phi^gamma \ Psi when the preferred zone is too small
  // (only the Psi-disjointness is used downstream).
  std::vector<std::uint8_t> in_phig(q, 0);
  for (i64 x : ps.phi_gamma) in_phig[static_cast<std::size_t>(x)] = 1;
  const i64 want = best_delta - forced;
  for (int pass = 0; pass < 2 && static_cast<i64>(ps.filler.size()) < want; ++pass) {
    for (i64 x = 0; x < q && static_cast<i64>(ps.filler.size()) < want; ++x) {
      if (!in_neg_gamma[static_cast<std::size_t>(x)]) continue;
      if (in_psi[static_cast<std::size_t>(x)]) continue;
      const bool in_phi_zone = in_phig[static_cast<std::size_t>(x)] != 0;
      if (pass == 0 && in_phi_zone) continue;
      if (pass == 1 && !in_phi_zone) continue;
      ps.filler.push_back(x);
      in_neg_gamma[static_cast<std::size_t>(x)] = 2;  // mark taken
    }
  }
  if (static_cast<i64>(ps.filler.size()) != want) {
    out.failures.push_back("(minute): filler zone too small for target |Delta_q|");
    return out;
  }

  ps.delta_bitmap.assign(q, 0);
  for (i64 x = 0; x < q; ++x)
    if (in_neg_gamma[static_cast<std::size_t>(x)] != 1)
      ps.delta_bitmap[static_cast<std::size_t>(x)] = 1;
  ps.delta_size = 0;
  for (std::uint8_t b : ps.delta_bitmap) ps.delta_size += b;
  if (ps.delta_size != best_delta) {
    out.failures.push_back("internal: delta size mismatch");
    return out;
  }

  // (soul) integers with a common r
  const Rat sr = (1 - gamma) / ps.p_delta();
  const Rat tr = ag / ps.p_psi();
  ps.r = best_r;
  ps.s = to_i64(Int(Rat(sr * rat_of(best_r)).get_num()));
  ps.t = to_i64(Int(Rat(tr * rat_of(best_r)).get_num()));
  if (sr != rat_of(ps.s, ps.r) || tr != rat_of(ps.t, ps.r)) {
    out.failures.push_back("internal: (soul) integers inconsistent");
    return out;
  }

  // invariant checks: P(Delta) < 1 - P(Lambda^gamma) + delta/8, Psi/Delta
  // disjoint, complement covered
  const Rat p_lam_gamma =
      rat_of(static_cast<i64>(thicken(lam_q, gamma).size()), q);
  if (!(ps.p_delta() < 1 - p_lam_gamma + params.delta / 8))
    out.failures.push_back("(hour): P(Delta_q) >= 1 - P(Lambda_q^gamma) + delta/8");
  if (!(ps.p_psi() >= ag)) out.failures.push_back("(late): P(Psi_q) < alpha*gamma");
  for (i64 x : ps.psi_set)
    if (ps.delta_bitmap[static_cast<std::size_t>(x)])
      out.failures.push_back("Psi_q intersects Delta_q");

  // (falsely): for every x in Psi, #{v in Lambda : x+v in Delta} >= 2a|Lambda|
  for (i64 x : ps.psi_set) {
    i64 cnt = 0;
    for (i64 v : lam_q.elements)
      if (ps.delta_bitmap[static_cast<std::size_t>((x + v) % q)]) ++cnt;
    if (rat_of(cnt) < phi_threshold) {
      out.failures.push_back("(falsely) fails at x=" + std::to_string(x));
      break;
    }
  }

  if (!out.failures.empty()) return out;
  out.ok = true;
  out.parts = std::move(ps);
  return out;
}

bool fate_check(const PeriodicFunction& f, const std::vector<i64>& psi_set, i64 q,
                const ResidueSet& lam_Q, const Rat& alpha) {
  if (lam_Q.modulus % f.period() != 0)
    throw std::invalid_argument("fate_check: qpT must divide Q");
  const i64 Q = lam_Q.modulus;
  std::vector<std::uint8_t> in_psi(static_cast<std::size_t>(q), 0);
  for (i64 x : psi_set) in_psi[static_cast<std::size_t>(((x % q) + q) % q)] = 1;
  const Rat denom = rat_of(static_cast<i64>(lam_Q.size()));
  // every lift of Psi_q inside Z_Q
  for (i64 x = 0; x < Q; ++x) {
    if (!in_psi[static_cast<std::size_t>(x % q)]) continue;
    Rat acc(0);
    for (i64 a : lam_Q.elements) {
      const i64 shift = (a == 0) ? Q : a;  // a ranges over [1, Q]
      acc += f.at(x + shift);
    }
    if (acc / denom < alpha) return false;
  }
  return true;
}

}  // namespace subavg
