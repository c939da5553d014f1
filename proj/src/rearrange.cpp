#include "subavg/rearrange.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <stdexcept>

#include <json.hpp>

namespace subavg {

void RearrangementPlan::validate() const {
  if (T < 1 || p < 1) throw std::invalid_argument("plan: T,p must be positive");
  if (gcd_i64(p, T) != 1) throw std::invalid_argument("plan: gcd(p,T) != 1");
  if (static_cast<i64>(shifts.size()) != isqrt_i64(p))
    throw std::invalid_argument("plan: expected floor(sqrt p) shifts");
  for (i64 s : shifts)
    if (s < 0 || s >= T) throw std::invalid_argument("plan: shift out of [0,T)");
}

std::string RearrangementPlan::to_json() const {
  nlohmann::json j;
  j["T"] = T;
  j["p"] = p;
  j["shifts"] = shifts;
  return j.dump();
}

RearrangementPlan RearrangementPlan::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  RearrangementPlan plan;
  plan.T = j.at("T").get<i64>();
  plan.p = j.at("p").get<i64>();
  plan.shifts = j.at("shifts").get<std::vector<i64>>();
  plan.validate();
  return plan;
}

PeriodicFunction apply_rearrangement(const PeriodicFunction& f,
                                     const RearrangementPlan& plan) {
  plan.validate();
  if (f.period() != plan.T) throw std::invalid_argument("rearrangement: period mismatch");
  std::vector<Rat> vals;
  vals.reserve(static_cast<std::size_t>(plan.period()));
  for (i64 x = 0; x < plan.period(); ++x) vals.push_back(f.at(plan.warp(x)));
  return PeriodicFunction::from_values(vals);
}

PeriodicFunction apply_rearrangement_lifted(const PeriodicFunction& f,
                                            const RearrangementPlan& plan) {
  plan.validate();
  if (f.period() % plan.T != 0)
    throw std::invalid_argument("lifted rearrangement: period must be a multiple of T");
  if (gcd_i64(f.period() / plan.T, plan.p) != 1)
    throw std::invalid_argument("lifted rearrangement: R must be coprime to p");
  const i64 np = plan.p * f.period();
  std::vector<Rat> vals;
  vals.reserve(static_cast<std::size_t>(np));
  for (i64 x = 0; x < np; ++x) vals.push_back(f.at(plan.warp(x)));
  return PeriodicFunction::from_values(vals);
}

std::vector<i64> rearranged_set(const std::vector<i64>& e_set,
                                const RearrangementPlan& plan) {
  plan.validate();
  std::vector<char> in(static_cast<std::size_t>(plan.T), 0);
  for (i64 x : e_set) in[static_cast<std::size_t>(((x % plan.T) + plan.T) % plan.T)] = 1;
  std::vector<i64> out;
  for (i64 x = 0; x < plan.period(); ++x)
    if (in[static_cast<std::size_t>(plan.warp(x) % plan.T)]) out.push_back(x);
  return out;
}

std::vector<i64> exceptional_E1(const std::vector<i64>& e_set,
                                const RearrangementPlan& plan, i64 guard) {
  if (guard < 0) throw std::invalid_argument("exceptional_E1: guard must be >= 0");
  const i64 pT = plan.period();
  std::vector<i64> out = rearranged_set(e_set, plan);
  std::set<i64> acc(out.begin(), out.end());
  // windows [b - guard, b] at every block boundary, plus the period wrap
  std::vector<i64> boundaries;
  for (i64 i = 1; i <= plan.root(); ++i) boundaries.push_back(i * plan.block_len() % pT);
  boundaries.push_back(0);
  for (i64 b : boundaries)
    for (i64 y = b - guard; y <= b; ++y) acc.insert(((y % pT) + pT) % pT);
  return std::vector<i64>(acc.begin(), acc.end());
}

namespace {

// Counts, for fixed shifts, the minimum over (x, b) of
// sum_{a in Lambda_pT} [rearranged 1_b](x+a).
struct WildcatVerifier {
  i64 T, pT, block_len, tail_start, root;
  // Lambda positions grouped by block and residue class mod T, as counts:
  // cnt[i][c] = |Lambda in block i intersect class c|, plus tail counts.
  std::vector<std::vector<i64>> block_class_count;
  std::vector<i64> tail_class_count;
  const ResidueSet* lam;

  WildcatVerifier(i64 t, const RearrangementPlan& plan, const ResidueSet& lam_pT)
      : T(t), pT(plan.period()), block_len(plan.block_len()),
        tail_start(plan.tail_start()), root(plan.root()), lam(&lam_pT) {}

  void index_for(i64 x) {
    block_class_count.assign(static_cast<std::size_t>(root),
                             std::vector<i64>(static_cast<std::size_t>(T), 0));
    tail_class_count.assign(static_cast<std::size_t>(T), 0);
    for (i64 a : lam->elements) {
      // a = 0 represents pT in the range 1..pT; same residue either way
      i64 z = (x + a) % pT;
      if (z < tail_start)
        ++block_class_count[static_cast<std::size_t>(z / block_len)]
                           [static_cast<std::size_t>(z % T)];
      else
        ++tail_class_count[static_cast<std::size_t>(z % T)];
    }
  }

  // For current x-index and shifts, count of hits landing in class b after
  // the warp: block i contributes its class (b - xi_i) mod T.
  i64 count_for(const std::vector<i64>& shifts, i64 b) const {
    i64 acc = tail_class_count[static_cast<std::size_t>(b)];
    for (i64 i = 0; i < root; ++i) {
      i64 c = (b - shifts[static_cast<std::size_t>(i)]) % T;
      if (c < 0) c += T;
      acc += block_class_count[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
    }
    return acc;
  }
};

}  // namespace

OmegaSearch find_good_omega(i64 T, i64 p, const ResidueSet& lam_pT, std::uint64_t seed,
                            i64 budget) {
  if (gcd_i64(p, T) != 1) throw std::invalid_argument("find_good_omega: gcd(p,T) != 1");
  if (lam_pT.modulus != p * T)
    throw std::invalid_argument("find_good_omega: Lambda must live mod pT");
  const i64 nl = static_cast<i64>(lam_pT.size());
  if (nl < 2 * T)
    throw std::invalid_argument("find_good_omega: |Lambda_pT| < 2T, bound unsatisfiable");

  OmegaSearch result;
  result.plan.T = T;
  result.plan.p = p;
  const i64 root = isqrt_i64(p);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<i64> pick(0, T - 1);

  WildcatVerifier ver(T, [&] {
    RearrangementPlan tmp;
    tmp.T = T;
    tmp.p = p;
    tmp.shifts.assign(static_cast<std::size_t>(root), 0);
    return tmp;
  }(), lam_pT);

  for (i64 cand = 0; cand < budget; ++cand) {
    std::vector<i64> shifts(static_cast<std::size_t>(root));
    for (i64& s : shifts) s = pick(rng);
    ++result.candidates_tried;

    bool ok = true;
    i64 worst_margin = 0;
    i64 worst_x = -1, worst_b = -1;
    bool first = true;
    for (i64 x = 0; x < p * T && ok; ++x) {
      ver.index_for(x);
      for (i64 b = 0; b < T; ++b) {
        const i64 cnt = ver.count_for(shifts, b);
        // bound: cnt >= nl/(2T), compare 2T*cnt vs nl
        const i64 margin = 2 * T * cnt - nl;
        if (first || margin < worst_margin) {
          worst_margin = margin;
          worst_x = x;
          worst_b = b;
          first = false;
        }
        if (margin < 0) {
          ok = false;
          break;
        }
      }
    }
    result.worst_scaled_margin = worst_margin;
    result.worst_x = worst_x;
    result.worst_b = worst_b;
    if (ok) {
      result.found = true;
      result.plan.shifts = std::move(shifts);
      result.plan.validate();
      return result;
    }
  }
  return result;
}

}  // namespace subavg
