#include <algorithm>
#include <set>
#include <stdexcept>

#include "subavg/family.hpp"
#include "subavg/spacing.hpp"

namespace subavg {

namespace {

struct BuildError {
  std::string message;
  nlohmann::json trace;
};

struct BuildCtx {
  const BuildConfig* cfg = nullptr;
  PsiOracle* psi = nullptr;
  std::set<i64> used;
  nlohmann::json steps = nlohmann::json::array();
  std::vector<Family>* intermediates = nullptr;
};

std::uint64_t mix_seed(std::uint64_t seed, i64 a, i64 b, i64 c) {
  std::uint64_t h = seed ^ 0x9e3779b97f4a7c15ull;
  for (i64 v : {a, b, c}) {
    h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return h;
}

Family build_rec(BuildCtx& ctx, int K, int M, int L, i64 A, Rat delta, i64 D);

// Empty ingredient for K = 1: S = R' = 1, no functions, E empty, Q' = 1.
Family empty_family(const StepParams& base) {
  Family fam;
  fam.params = base;
  fam.params.K = 0;
  fam.params.L = 0;
  fam.T = 1;
  fam.R = 1;
  fam.E = {0};
  fam.q_values = {1};
  fam.q_idx = {0};
  return fam;
}

Family build_step(BuildCtx& ctx, const Family& base, int K, int M, int L, i64 A,
                  const Rat& delta, i64 D) {
  const BuildConfig& cfg = *ctx.cfg;
  StepParams params = base.params;  // carries delta/4 from the base build
  params.K = K;
  params.M = M;

  nlohmann::json attempts = nlohmann::json::array();
  const i64 psi_AT = ctx.psi->psi(A * base.T);

  for (i64 q : cfg.pools.q_pool) {
    if (ctx.used.count(q)) continue;
    nlohmann::json qlog;
    qlog["q"] = q;
    if (gcd_i64(q, base.T) != 1 || gcd_i64(q, base.R) != 1 || gcd_i64(q, D) != 1) {
      qlog["skip"] = "not coprime to T, R or D";
      attempts.push_back(qlog);
      continue;
    }
    const ResidueSet lam_q = admissible_residues(cfg.seq, q);
    // section-6 size conditions, checked by the caller of the selection
    const Rat s_q = lam_q.mean_spacing();
    const Rat size_bound = rat_of(8) / delta * rat_of(psi_AT);
    if (!(s_q > size_bound)) {
      qlog["skip"] = "size: s_q = " + rat_str(s_q) + " <= 8/delta * psi(A T) = " +
                     rat_str(size_bound);
      attempts.push_back(qlog);
      continue;
    }
    const Rat p_thick = rat_of(static_cast<i64>(thicken(lam_q, params.gamma).size()), q);
    if (!(p_thick >= params.gamma - params.epsilon)) {
      qlog["skip"] = "(wine): P(Lambda_q^gamma) = " + rat_str(p_thick) + " < gamma-eps";
      attempts.push_back(qlog);
      continue;
    }
    {
      const i64 earth = condition_earth_count(lam_q, params.gamma);
      const Rat bound = 5 * params.alpha * rat_of(static_cast<i64>(lam_q.size())) *
                        rat_of(static_cast<i64>(lam_q.size()));
      if (!(rat_of(earth) >= bound)) {
        qlog["skip"] = "(earth): count " + std::to_string(earth) + " < 5 alpha |Lam|^2";
        attempts.push_back(qlog);
        continue;
      }
    }
    StepParams sel_params = params;
    sel_params.delta = delta;  // budget for (hour)/(minute) belongs to the target
    SelectOutcome sel = select_partition_sets(lam_q, sel_params);
    if (!sel.ok) {
      qlog["skip"] = "partition selection failed";
      qlog["failures"] = sel.failures;
      attempts.push_back(qlog);
      continue;
    }

    for (i64 p : cfg.pools.p_pool) {
      if (ctx.used.count(p)) continue;
      if (gcd_i64(p, q) != 1 || gcd_i64(p, base.T) != 1 || gcd_i64(p, base.R) != 1 ||
          gcd_i64(p, D) != 1)
        continue;
      nlohmann::json plog;
      plog["q"] = q;
      plog["p"] = p;

      ctx.used.insert(q);
      ctx.used.insert(p);
      bool keep = false;
      try {
        Family ingredient_storage;
        const Family* ingredient = nullptr;
        if (K > 1) {
          ingredient_storage =
              build_rec(ctx, K - 1, M, M, A * base.T * p * q, delta / 4,
                        D * base.T * p * q);
          ingredient = &ingredient_storage;
        }
        const i64 S = ingredient ? ingredient->T : 1;
        const i64 t_next = S * base.T * p * q;
        if (t_next > params.t_cap) {
          plog["skip"] = "T = " + std::to_string(t_next) + " exceeds cap";
          attempts.push_back(plog);
        } else {
          const ResidueSet lam_pT = admissible_residues(cfg.seq, p * base.T);
          if (static_cast<i64>(lam_pT.size()) < 2 * base.T) {
            plog["skip"] = "|Lambda_pT| < 2T";
            attempts.push_back(plog);
          } else {
            OmegaSearch omega = find_good_omega(
                base.T, p, lam_pT, mix_seed(cfg.seed, q, p, L), cfg.omega_budget);
            if (!omega.found) {
              plog["skip"] = "omega search exhausted budget";
              plog["tried"] = omega.candidates_tried;
              attempts.push_back(plog);
            } else {
              StepInputs si;
              si.base = &base;
              si.ingredient = ingredient;
              si.p = p;
              si.lam_q = lam_q;
              si.plan = omega.plan;
              si.parts = sel.parts;
              si.psi = ctx.psi;
              si.seq = cfg.seq;
              StepResult sr = inductive_step(si);
              plog["step"] = sr.log;
              if (!sr.ok) {
                plog["diagnostics"] = sr.diagnostics;
                attempts.push_back(plog);
              } else {
                plog["ok"] = true;
                attempts.push_back(plog);
                ctx.steps.push_back(plog);
                keep = true;
                if (ctx.intermediates) ctx.intermediates->push_back(sr.family);
                return sr.family;
              }
            }
          }
        }
      } catch (const BuildError& be) {
        plog["ingredient_failure"] = be.trace;
        attempts.push_back(plog);
      }
      if (!keep) {
        ctx.used.erase(q);
        ctx.used.erase(p);
      }
    }
    attempts.push_back(qlog);
  }

  BuildError err;
  err.message = "no admissible (q, p) pair for step (" + std::to_string(K) + "," +
                std::to_string(M) + "," + std::to_string(L) + ")";
  err.trace["step"] = {K, M, L};
  err.trace["delta"] = rat_str(delta);
  err.trace["psi_AT"] = psi_AT;
  err.trace["attempts"] = attempts;
  throw err;
}

Family build_rec(BuildCtx& ctx, int K, int M, int L, i64 A, Rat delta, i64 D) {
  const BuildConfig& cfg = *ctx.cfg;
  StepParams params = cfg.params;
  params.K = K;
  params.M = M;
  params.L = L;
  params.A = A;
  params.delta = delta;
  params.D = D;

  if (K == 0) return empty_family(params);
  if (L == 0) {
    if (K == 1) {
      Family fam = trivial_step_family(params);
      if (ctx.intermediates) ctx.intermediates->push_back(fam);
      return fam;
    }
    Family prev = build_rec(ctx, K - 1, M, M, A, delta, D);
    Family fam = extend_family(prev);
    fam.params.A = A;
    fam.params.delta = delta;
    fam.params.D = D;
    if (ctx.intermediates) ctx.intermediates->push_back(fam);
    return fam;
  }
  Family base = build_rec(ctx, K, M, L - 1, A, delta / 4, D);
  return build_step(ctx, base, K, M, L, A, delta, D);
}

}  // namespace

BuildResult build_family(const BuildConfig& cfg) {
  BuildResult out;
  cfg.params.validate();
  cfg.pools.validate();
  const int target = (cfg.target_L >= 0) ? cfg.target_L : cfg.M;
  if (target > cfg.M) throw std::invalid_argument("build_family: target L > M");

  PsiOracle psi(cfg.seq, cfg.pools, cfg.params.beta, cfg.params.scan_horizon,
                cfg.params.S);
  BuildCtx ctx;
  ctx.cfg = &cfg;
  ctx.psi = &psi;
  if (cfg.keep_intermediates) ctx.intermediates = &out.intermediates;

  try {
    out.family = build_rec(ctx, cfg.K, cfg.M, target, cfg.params.A, cfg.params.delta,
                           cfg.params.D);
    out.ok = true;
  } catch (const BuildError& be) {
    out.ok = false;
    out.error = be.message;
    out.log["failure"] = be.trace;
  }
  out.log["steps"] = ctx.steps;
  out.log["seed"] = cfg.seed;
  out.log["p_pool"] = cfg.pools.p_pool;
  out.log["q_pool"] = cfg.pools.q_pool;
  out.log["params"] = cfg.params.to_json();
  out.log["psi_warnings"] = psi.warnings();
  return out;
}

}  // namespace subavg
