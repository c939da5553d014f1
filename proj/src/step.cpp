#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "subavg/family.hpp"

namespace subavg {

namespace {

std::vector<i64> bitmap_to_set(const std::vector<std::uint8_t>& bm) {
  std::vector<i64> out;
  for (std::size_t i = 0; i < bm.size(); ++i)
    if (bm[i]) out.push_back(static_cast<i64>(i));
  return out;
}

// distance from u to the first position outside Delta (q-periodic);
// LLONG_MAX when Delta covers everything
std::vector<i64> exit_distances(const PartitionSets& parts) {
  const i64 q = parts.q;
  std::vector<i64> dist(static_cast<std::size_t>(q), std::numeric_limits<i64>::max());
  bool has_hole = false;
  for (i64 x = 0; x < q; ++x)
    if (!parts.delta_bitmap[static_cast<std::size_t>(x)]) has_hole = true;
  if (!has_hole) return dist;
  // backwards sweep over two copies of the circle, tracking the distance to
  // the next position outside Delta
  std::vector<i64> d2(static_cast<std::size_t>(2 * q), 0);
  i64 next = std::numeric_limits<i64>::max() / 2;
  for (i64 x = 2 * q - 1; x >= 0; --x) {
    if (!parts.delta_bitmap[static_cast<std::size_t>(x % q)])
      next = 0;
    else if (next < std::numeric_limits<i64>::max() / 2)
      ++next;
    d2[static_cast<std::size_t>(x)] = next;
  }
  for (i64 x = 0; x < q; ++x) {
    // distance to first y >= 1 with x+y outside Delta
    const i64 nxt = d2[static_cast<std::size_t>(x + 1)];
    dist[static_cast<std::size_t>(x)] = nxt + 1;
  }
  return dist;
}

}  // namespace

RestrictedFamily restrict_family(const Family& fam, const ResidueSet& lam_q, i64 B,
                                 PsiOracle& psi) {
  (void)psi;
  const i64 q = lam_q.modulus;
  const i64 T = fam.T;
  if (gcd_i64(q, B) != 1 || gcd_i64(q, T) != 1 || gcd_i64(B, T) != 1)
    throw std::invalid_argument("restrict_family: q, B, T must be pairwise coprime");
  const i64 qB = q * B;
  if (qB > fam.params.A)
    throw std::invalid_argument("restrict_family: qB exceeds A");
  if (fam.params.A % qB != 0)
    throw std::invalid_argument("restrict_family: qB must divide A");

  const Rat gamma = fam.params.gamma;
  RestrictedFamily out;
  out.q = q;
  out.B = B;
  const i64 m = thicken_offsets(lam_q, gamma);
  for (i64 j = 1; j <= m; ++j) out.xi_gamma.push_back(j % q);
  out.neg_gamma = thicken(negate(lam_q), gamma);

  Family& bar = out.barred;
  bar.params = fam.params;
  bar.params.A = fam.params.A / qB;
  bar.params.D = fam.params.D / gcd_i64(fam.params.D, qB);
  bar.T = qB * T;
  bar.R = fam.R;

  // f-bar_h = |Lambda_q| f_h 1_{Xi^gamma_q}
  const Rat scale = rat_of(static_cast<i64>(lam_q.size()));
  std::vector<std::uint8_t> in_xi(static_cast<std::size_t>(q), 0);
  for (i64 x : out.xi_gamma) in_xi[static_cast<std::size_t>(x)] = 1;
  for (const auto& fh : fam.f) {
    std::vector<Rat> vals;
    vals.reserve(static_cast<std::size_t>(bar.T));
    for (i64 x = 0; x < bar.T; ++x) {
      if (in_xi[static_cast<std::size_t>(x % q)])
        vals.push_back(scale * fh.at(x));
      else
        vals.push_back(Rat(0));
    }
    bar.f.push_back(PeriodicFunction::from_values(vals));
  }

  // X-bar_h = X_h 1_{(-Lambda_q)^gamma}
  const XFactor neg_factor = XFactor::set(out.neg_gamma, q);
  for (const auto& xh : fam.X) {
    XFunction xb = xh.with_factor(neg_factor);
    xb.set_period(bar.R * bar.T);
    bar.X.push_back(std::move(xb));
  }

  // E-bar = E intersect (-Lambda_q)^gamma
  std::vector<std::uint8_t> in_neg(static_cast<std::size_t>(q), 0);
  for (i64 x : out.neg_gamma) in_neg[static_cast<std::size_t>(x)] = 1;
  bar.E.assign(static_cast<std::size_t>(bar.T), 0);
  for (i64 x = 0; x < bar.T; ++x)
    if (fam.in_E(x) && in_neg[static_cast<std::size_t>(x % q)])
      bar.E[static_cast<std::size_t>(x)] = 1;

  // Q-bar_x = qB Q_x
  bar.q_values.clear();
  for (i64 v : fam.q_values) bar.q_values.push_back(qB * v);
  bar.q_idx.assign(static_cast<std::size_t>(bar.T), 0);
  for (i64 x = 0; x < bar.T; ++x)
    bar.q_idx[static_cast<std::size_t>(x)] = fam.q_idx[static_cast<std::size_t>(x % T)];

  return out;
}

StepResult inductive_step(const StepInputs& in) {
  StepResult res;
  if (!in.base || !in.psi) throw std::invalid_argument("inductive_step: missing inputs");
  const Family& base = *in.base;
  const PartitionSets& parts = in.parts;
  const i64 q = parts.q;
  const i64 p = in.p;
  const i64 T_L = base.T;
  const i64 R_L = base.R;
  const StepParams& bp = base.params;
  const Rat gamma = bp.gamma, alpha = bp.alpha;

  const i64 S = in.ingredient ? in.ingredient->T : 1;
  const i64 Rp = in.ingredient ? in.ingredient->R : 1;

  auto fail = [&](const std::string& msg) {
    res.diagnostics.push_back(msg);
    return res;
  };

  // pairwise coprimality of {S, T_L, p, q} and of p,q against R_L, R', D
  for (i64 v : {p, q}) {
    if (gcd_i64(v, T_L) != 1 || gcd_i64(v, R_L) != 1 || gcd_i64(v, bp.D) != 1 ||
        gcd_i64(v, S) != 1 || gcd_i64(v, Rp) != 1)
      return fail("coprimality violated for p or q");
  }
  if (gcd_i64(p, q) != 1) return fail("p and q must be coprime");

  const i64 T_next = S * T_L * p * q;
  if (T_next > bp.t_cap)
    return fail("T cap exceeded: " + std::to_string(T_next) + " > " +
                std::to_string(bp.t_cap));

  // target parameters for the assembled (K,M,L+1) family: the base was
  // built with delta/4, the target delta is 4x the base's
  StepParams target = bp;
  target.L = bp.L + 1;
  target.delta = bp.delta * 4;

  // rearranged f's (period p*T_L)
  std::vector<PeriodicFunction> f_tilde;
  for (const auto& fh : base.f) {
    PeriodicFunction lifted = (fh.period() == T_L) ? fh : fh.lifted(T_L);
    f_tilde.push_back(apply_rearrangement(lifted, in.plan));
  }

  // guard windows and E^1 (subset of Z_{pT_L})
  const i64 guard = in.psi->psi(bp.A * T_L);
  const std::vector<i64> e1 = exceptional_E1(bitmap_to_set(base.E), in.plan, guard);
  std::vector<std::uint8_t> e1_bitmap(static_cast<std::size_t>(p * T_L), 0);
  for (i64 x : e1) e1_bitmap[static_cast<std::size_t>(x)] = 1;

  // rearranged Q-map: Qtilde(x) = Q_{warp(x) mod T_L}, period p*T_L
  auto q_tilde = [&](i64 x) { return base.Qx(in.plan.warp(x % (p * T_L))); };

  // E^2 = { x in Delta_q : exists 0 < y <= psi(A * Qtilde(x)) with x+y off Delta }
  std::vector<i64> window_by_value(base.q_values.size());
  for (std::size_t i = 0; i < base.q_values.size(); ++i)
    window_by_value[i] = in.psi->psi(bp.A * base.q_values[i]);
  const std::vector<i64> exit_dist = exit_distances(parts);

  // barred ingredient on (-Lambda_q)^gamma with B = T_L * p
  const i64 B = T_L * p;
  std::optional<RestrictedFamily> barred;
  if (in.ingredient) barred = restrict_family(*in.ingredient, in.lam_q, B, *in.psi);

  const std::vector<i64> neg_gamma = thicken(negate(in.lam_q), gamma);
  std::vector<std::uint8_t> in_neg(static_cast<std::size_t>(q), 0);
  for (i64 x : neg_gamma) in_neg[static_cast<std::size_t>(x)] = 1;

  Family fam;
  fam.params = target;
  fam.T = T_next;
  fam.R = R_L * Rp * parts.r;

  if (gcd_i64(fam.R, bp.D) != 1) return fail("gcd(R_{L+1}, D) != 1");

  // E_{L+1} = E^1 union E^2 union Ebar'
  fam.E.assign(static_cast<std::size_t>(T_next), 0);
  const i64 pTL = p * T_L;
  for (i64 x = 0; x < T_next; ++x) {
    bool in_e = e1_bitmap[static_cast<std::size_t>(x % pTL)] != 0;
    if (!in_e && parts.delta_bitmap[static_cast<std::size_t>(x % q)]) {
      const i64 w = window_by_value[base.q_idx[static_cast<std::size_t>(
          in.plan.warp(x % pTL) % T_L)]];
      if (exit_dist[static_cast<std::size_t>(x % q)] <= w) in_e = true;
    }
    if (!in_e && barred && barred->barred.E[static_cast<std::size_t>(
                               x % barred->barred.T)])
      in_e = true;
    fam.E[static_cast<std::size_t>(x)] = in_e ? 1 : 0;
  }

  // f_K^{L+1} = (1-gamma)^{-1} f~_K 1_Delta ; f_h = f~_h 1_Delta + gbar_h off Delta
  const Rat inv = Rat(1) / (1 - gamma);
  const int K = bp.K;
  fam.f.reserve(K);
  for (int h = 0; h < K; ++h) {
    std::vector<Rat> vals;
    vals.reserve(static_cast<std::size_t>(T_next));
    const bool is_last = (h == K - 1);
    for (i64 x = 0; x < T_next; ++x) {
      const bool on_delta = parts.delta_bitmap[static_cast<std::size_t>(x % q)] != 0;
      Rat v(0);
      if (on_delta) {
        v = f_tilde[static_cast<std::size_t>(h)].at(x % pTL);
        if (is_last) v *= inv;
      } else if (!is_last && barred) {
        v = barred->barred.f[static_cast<std::size_t>(h)].at(x);
      } else if (is_last) {
        v = 0;
      }
      vals.push_back(v);
    }
    fam.f.push_back(PeriodicFunction::from_values(vals));
  }

  // Q_{x,L+1}: Qtilde on Delta, qB Q'_x off Delta
  {
    std::vector<i64> values;
    auto value_index = [&](i64 v) {
      for (std::size_t i = 0; i < values.size(); ++i)
        if (values[i] == v) return i;
      values.push_back(v);
      return values.size() - 1;
    };
    fam.q_idx.assign(static_cast<std::size_t>(T_next), 0);
    for (i64 x = 0; x < T_next; ++x) {
      i64 v;
      if (parts.delta_bitmap[static_cast<std::size_t>(x % q)]) {
        v = q_tilde(x);
      } else {
        const i64 qx_ing = in.ingredient ? in.ingredient->Qx(x) : 1;
        v = q * B * qx_ing;
      }
      const std::size_t idx = value_index(v);
      if (idx > 255) return fail("too many distinct Q_x values");
      fam.q_idx[static_cast<std::size_t>(x)] = static_cast<std::uint8_t>(idx);
    }
    fam.q_values = std::move(values);
  }

  // Gamma_s, Gamma_t: initial intervals of s (resp. t) copies of
  // R'*R_L*T_{L+1} inside Z_{R_{L+1} T_{L+1}}
  const i64 unit = Rp * R_L * T_next;
  const i64 full = fam.R * T_next;
  const XFactor gamma_s = XFactor::interval(full, parts.s * unit);
  const XFactor gamma_t = XFactor::interval(full, parts.t * unit);
  const XFactor delta_factor = XFactor::set(bitmap_to_set(parts.delta_bitmap), q);
  const XFactor psi_factor = XFactor::set(parts.psi_set, q);
  const XFactor neg_factor = XFactor::set(neg_gamma, q);
  std::vector<std::uint8_t> not_delta(static_cast<std::size_t>(q), 0);
  for (i64 x = 0; x < q; ++x)
    not_delta[static_cast<std::size_t>(x)] = parts.delta_bitmap[static_cast<std::size_t>(x)] ? 0 : 1;
  const XFactor off_delta_factor = XFactor::set(bitmap_to_set(not_delta), q);

  fam.X.reserve(K);
  for (int h = 0; h < K; ++h) {
    const bool is_last = (h == K - 1);
    XFunction on_delta_part = base.X[static_cast<std::size_t>(h)]
                                  .warped(in.plan)
                                  .with_factor(delta_factor);
    if (is_last) {
      XFunction xk = on_delta_part.scaled(inv).with_factor(gamma_s);
      XTerm bump;
      bump.coeff = alpha;
      bump.factors = {psi_factor, gamma_t};
      xk.terms().push_back(bump);
      xk.set_period(full);
      fam.X.push_back(std::move(xk));
    } else {
      XFunction xh = on_delta_part;
      if (barred) {
        XFunction zbar = barred->barred.X[static_cast<std::size_t>(h)]
                             .with_factor(off_delta_factor);
        xh = xh.plus(zbar);
      }
      xh.set_period(full);
      fam.X.push_back(std::move(xh));
    }
  }

  // post-assembly checks: measure budget, growl, fate
  const Rat pe = fam.e_measure();
  if (!(pe <= target.delta))
    res.diagnostics.push_back("P(E_{L+1}) = " + rat_str(pe) + " exceeds delta = " +
                              rat_str(target.delta));

  const Rat ef_old = base.f.back().mean();
  const Rat ef_new = fam.f.back().mean();
  if (!(ef_old <= ef_new && ef_new <= (1 + 4 * bp.epsilon) * ef_old))
    res.diagnostics.push_back("(growl) violated: E f_K " + rat_str(ef_old) + " -> " +
                              rat_str(ef_new));

  {
    // Lemma-fate self-check at the smallest admissible modulus q*p*T_L*S
    const ResidueSet lam_fate = admissible_residues(in.seq, T_next);
    if (!fate_check(fam.f.back(), parts.psi_set, q, lam_fate, alpha))
      res.diagnostics.push_back("fate check failed on Psi_q");
  }

  res.log["q"] = q;
  res.log["p"] = p;
  res.log["T"] = T_next;
  res.log["R"] = fam.R;
  res.log["r"] = parts.r;
  res.log["s"] = parts.s;
  res.log["t"] = parts.t;
  res.log["guard"] = guard;
  res.log["P_E"] = rat_str(pe);
  res.log["E_f_K"] = rat_str(ef_new);
  res.log["shifts"] = in.plan.shifts;
  res.log["psi_size"] = static_cast<i64>(parts.psi_set.size());
  res.log["delta_size"] = parts.delta_size;
  res.log["filler_size"] = static_cast<i64>(parts.filler.size());

  if (!res.diagnostics.empty()) return res;
  fam.validate_structure();
  res.ok = true;
  res.family = std::move(fam);
  return res;
}

}  // namespace subavg
