#include "subavg/verify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace subavg {

Rat residue_average(const PeriodicFunction& f, const ResidueSet& lam_Q, i64 x) {
  if (lam_Q.elements.empty()) throw std::invalid_argument("residue_average: empty set");
  std::vector<i64> counts(f.table().size(), 0);
  for (i64 a : lam_Q.elements) {
    const i64 shift = (a == 0) ? lam_Q.modulus : a;  // representatives in [1, Q]
    ++counts[f.index_at(x + shift)];
  }
  Rat acc(0);
  for (std::size_t i = 0; i < counts.size(); ++i)
    if (counts[i]) acc += f.table()[i] * rat_of(counts[i]);
  return acc / rat_of(static_cast<i64>(lam_Q.size()));
}

Rat subsequence_average(const PeriodicFunction& f, const SequenceSpec& seq, i64 n,
                        i64 x) {
  if (n < 1) throw std::invalid_argument("subsequence_average: N >= 1");
  std::vector<i64> counts(f.table().size(), 0);
  const i64 period = f.period();
  for_each_term_mod(seq, period, n,
                    [&](i64, i64 r) { ++counts[f.index_at(x + r)]; });
  Rat acc(0);
  for (std::size_t i = 0; i < counts.size(); ++i)
    if (counts[i]) acc += f.table()[i] * rat_of(counts[i]);
  return acc / rat_of(n);
}

Rat weak_norm(const PeriodicFunction& g) {
  // lambda * P(|g| >= lambda) maximized over the distinct values of |g|
  std::map<Rat, i64> count_by_abs;
  std::vector<i64> counts(g.table().size(), 0);
  for (i64 x = 0; x < g.period(); ++x) ++counts[g.index_at(x)];
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (!counts[i]) continue;
    Rat v = g.table()[i] < 0 ? Rat(-g.table()[i]) : g.table()[i];
    count_by_abs[v] += counts[i];
  }
  Rat best(0);
  i64 at_least = 0;
  for (auto it = count_by_abs.rbegin(); it != count_by_abs.rend(); ++it) {
    at_least += it->second;
    Rat cand = it->first * rat_of(at_least, g.period());
    if (cand > best) best = cand;
  }
  return best;
}

nlohmann::json VerificationReport::to_json() const {
  nlohmann::json j;
  j["pass"] = pass;
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : checks)
    arr.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  j["checks"] = arr;
  return j;
}

namespace {

// Cached evaluation of an XFunction through term pass-patterns.
class XEval {
 public:
  explicit XEval(const XFunction& x) : x_(&x) {
    if (x.terms().size() > 20) throw std::runtime_error("XEval: too many terms");
    values_.assign(1u << x.terms().size(), Rat(0));
    known_.assign(1u << x.terms().size(), 0);
  }
  std::uint32_t pattern(i64 pos) const {
    std::uint32_t key = 0;
    const auto& terms = x_->terms();
    for (std::size_t j = 0; j < terms.size(); ++j)
      if (terms[j].pass(pos)) key |= (1u << j);
    return key;
  }
  const Rat& value(std::uint32_t key) {
    if (!known_[key]) {
      Rat v(0);
      const auto& terms = x_->terms();
      for (std::size_t j = 0; j < terms.size(); ++j)
        if (key & (1u << j)) v += terms[j].coeff;
      values_[key] = v;
      known_[key] = 1;
    }
    return values_[key];
  }
  const Rat& at(i64 pos) { return value(pattern(pos)); }

 private:
  const XFunction* x_;
  std::vector<Rat> values_;
  std::vector<char> known_;
};

// avg[h][u] = exact Lambda_{Q_u}-average of f_h at u, for u in Z_T
std::vector<std::vector<Rat>> joker_averages(const Family& fam, const SequenceSpec& seq) {
  std::map<i64, ResidueSet> lam_by_q;
  for (i64 v : fam.q_values) lam_by_q.emplace(v, admissible_residues(seq, v));
  std::vector<std::vector<Rat>> avg(fam.f.size(), std::vector<Rat>(fam.T, Rat(0)));
  for (std::size_t h = 0; h < fam.f.size(); ++h) {
    const PeriodicFunction& f = fam.f[h];
    std::vector<i64> counts(f.table().size(), 0);
    for (i64 u = 0; u < fam.T; ++u) {
      const ResidueSet& lam = lam_by_q.at(fam.Qx(u));
      std::fill(counts.begin(), counts.end(), 0);
      for (i64 a : lam.elements) {
        const i64 shift = (a == 0) ? lam.modulus : a;
        ++counts[f.index_at(u + shift)];
      }
      Rat acc(0);
      for (std::size_t i = 0; i < counts.size(); ++i)
        if (counts[i]) acc += f.table()[i] * rat_of(counts[i]);
      avg[h][static_cast<std::size_t>(u)] = acc / rat_of(static_cast<i64>(lam.size()));
    }
  }
  return avg;
}

Rat rat_pow(const Rat& base, i64 e) {
  Rat acc(1);
  for (i64 i = 0; i < e; ++i) acc *= base;
  return acc;
}

bool same_distribution(const std::vector<std::pair<Rat, Rat>>& got,
                       const std::vector<std::pair<Rat, Rat>>& want, std::string* why) {
  auto nonzero = [](const std::vector<std::pair<Rat, Rat>>& v) {
    std::vector<std::pair<Rat, Rat>> out;
    for (const auto& [a, p] : v)
      if (p != 0) out.emplace_back(a, p);
    return out;
  };
  auto g = nonzero(got), w = nonzero(want);
  if (g.size() != w.size()) {
    if (why) *why = "atom counts differ: " + std::to_string(g.size()) + " vs " +
                    std::to_string(w.size());
    return false;
  }
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i].first != w[i].first || g[i].second != w[i].second) {
      if (why)
        *why = "atom mismatch at " + rat_str(g[i].first) + ": " + rat_str(g[i].second) +
               " vs " + rat_str(w[i].first) + " -> " + rat_str(w[i].second);
      return false;
    }
  }
  return true;
}

}  // namespace

bool pairwise_independence_check(const XFunction& a, const XFunction& b, i64 n, i64 cap) {
  if (n > cap) throw std::runtime_error("pairwise_independence_check: period beyond cap");
  if (n % a.period() != 0 || n % b.period() != 0)
    throw std::invalid_argument("pairwise_independence_check: periods must divide N");
  if (a.terms().size() + b.terms().size() > 24)
    throw std::runtime_error("pairwise_independence_check: too many terms");
  XEval ea(a), eb(b);
  const std::size_t na = a.terms().size(), nb = b.terms().size();
  std::vector<i64> joint((1u << na) * (1u << nb), 0);
  for (i64 x = 0; x < n; ++x)
    ++joint[(static_cast<std::size_t>(ea.pattern(x)) << nb) + eb.pattern(x)];
  // fold patterns to values
  std::map<Rat, i64> ca, cb;
  std::map<std::pair<Rat, Rat>, i64> cj;
  for (std::uint32_t ka = 0; ka < (1u << na); ++ka) {
    for (std::uint32_t kb = 0; kb < (1u << nb); ++kb) {
      const i64 cnt = joint[(static_cast<std::size_t>(ka) << nb) + kb];
      if (!cnt) continue;
      const Rat va = ea.value(ka), vb = eb.value(kb);
      ca[va] += cnt;
      cb[vb] += cnt;
      cj[{va, vb}] += cnt;
    }
  }
  for (const auto& [va, cnta] : ca)
    for (const auto& [vb, cntb] : cb) {
      i64 cj_cnt = 0;
      auto it = cj.find({va, vb});
      if (it != cj.end()) cj_cnt = it->second;
      // P(a=va, b=vb) == P(a=va) P(b=vb)  <=>  cj*n == cnta*cntb
      if (static_cast<__int128>(cj_cnt) * n !=
          static_cast<__int128>(cnta) * cntb)
        return false;
    }
  return true;
}

VerificationReport verify_family(const Family& fam, const SequenceSpec& seq,
                                 PsiOracle& psi) {
  VerificationReport rep;
  auto push = [&](const std::string& name, bool pass, const std::string& detail) {
    rep.checks.push_back({name, pass, detail});
  };

  // structure
  try {
    fam.validate_structure();
    bool qset_ok = true;
    std::string bad;
    for (i64 v : fam.q_values)
      if (!psi.pools().in_qset(v)) {
        qset_ok = false;
        bad = std::to_string(v);
      }
    push("structure", qset_ok, qset_ok ? "" : "Q_x value " + bad + " not in Qset");
  } catch (const std::exception& e) {
    push("structure", false, e.what());
    rep.pass = false;
    return rep;
  }

  const StepParams& pr = fam.params;
  const i64 rt = fam.RT();
  if (rt > pr.rt_cap)
    throw std::runtime_error("verify_family: R*T = " + std::to_string(rt) +
                             " exceeds enumeration cap");

  // (1) 1 <= E f_h <= (1+4eps)^{(K-1)M+L}
  {
    const Rat upper = rat_pow(1 + 4 * pr.epsilon,
                              static_cast<i64>(pr.K - 1) * pr.M + pr.L);
    bool ok = true;
    std::string detail;
    for (std::size_t h = 0; h < fam.f.size(); ++h) {
      const Rat m = fam.f[h].mean();
      if (!fam.f[h].nonnegative()) {
        ok = false;
        detail = "f_" + std::to_string(h + 1) + " takes negative values";
        break;
      }
      if (!(1 <= m && m <= upper)) {
        ok = false;
        detail = "E f_" + std::to_string(h + 1) + " = " + rat_str(m) +
                 " outside [1, " + rat_str(upper) + "]";
        break;
      }
      detail += (h ? " " : "") + rat_str(m);
    }
    push("(1) means", ok, detail);
  }

  // (2) exact distributions and pairwise independence
  {
    bool ok = true;
    std::string detail;
    for (std::size_t h = 0; h < fam.X.size() && ok; ++h) {
      const i64 level = (static_cast<int>(h) + 1 < pr.K) ? pr.M : pr.L;
      const YDistribution want = y_distribution(level, pr.gamma, pr.alpha);
      std::string why;
      if (!same_distribution(fam.X[h].distribution(pr.rt_cap), want.atoms, &why)) {
        ok = false;
        detail = "X_" + std::to_string(h + 1) + " != Y_{" + std::to_string(level) +
                 "}: " + why;
      }
    }
    for (std::size_t i = 0; i + 1 < fam.X.size() && ok; ++i)
      for (std::size_t j = i + 1; j < fam.X.size() && ok; ++j)
        if (!pairwise_independence_check(fam.X[i], fam.X[j], rt, pr.rt_cap)) {
          ok = false;
          detail = "X_" + std::to_string(i + 1) + ", X_" + std::to_string(j + 1) +
                   " joint histogram does not factor";
        }
    push("(2) distributions", ok, detail);
  }

  // (3) P(E) <= delta
  {
    const Rat pe = fam.e_measure();
    push("(3) exceptional measure", pe <= pr.delta,
         "P(E) = " + rat_str(pe) + " vs delta = " + rat_str(pr.delta));
  }

  // (4) joker + thief off E
  {
    const auto avg = joker_averages(fam, seq);
    std::vector<XEval> evals;
    evals.reserve(fam.X.size());
    for (const auto& x : fam.X) evals.emplace_back(x);

    bool ok = true;
    std::string detail;
    for (i64 x = 0; x < rt && ok; ++x) {
      const i64 u = x % fam.T;
      if (fam.E[static_cast<std::size_t>(u)]) continue;
      for (std::size_t h = 0; h < fam.X.size(); ++h) {
        const Rat& xv = evals[h].at(x);
        if (avg[h][static_cast<std::size_t>(u)] < xv) {
          ok = false;
          detail = "joker fails at x=" + std::to_string(x) + " h=" +
                   std::to_string(h + 1) + ": avg " +
                   rat_str(avg[h][static_cast<std::size_t>(u)]) + " < X " + rat_str(xv);
          break;
        }
      }
    }
    push("(4) averaging bound", ok, detail);

    // thief: f_h(x+y-Q_x) = f_h(x+y) for Q_x <= y <= psi(A Q_x)
    bool tok = true;
    std::string tdetail;
    i64 work = 0;
    const i64 work_cap = 2'000'000'000;
    for (i64 vi = 0; vi < static_cast<i64>(fam.q_values.size()) && tok; ++vi) {
      const i64 qv = fam.q_values[static_cast<std::size_t>(vi)];
      const i64 hi = psi.psi(pr.A * qv);
      bool all_periodic = true;
      for (const auto& f : fam.f)
        if (!f.has_period(qv)) all_periodic = false;
      if (all_periodic || hi < qv) continue;
      for (i64 u = 0; u < fam.T && tok; ++u) {
        if (fam.E[static_cast<std::size_t>(u)]) continue;
        if (fam.q_idx[static_cast<std::size_t>(u)] != vi) continue;
        for (const auto& f : fam.f) {
          for (i64 y = qv; y <= hi; ++y) {
            if (++work > work_cap)
              throw std::runtime_error("verify_family: (thief) work cap exceeded");
            if (f.index_at(u + y - qv) != f.index_at(u + y)) {
              tok = false;
              tdetail = "thief fails at x=" + std::to_string(u) +
                        " y=" + std::to_string(y) + " Q=" + std::to_string(qv);
              break;
            }
          }
          if (!tok) break;
        }
      }
    }
    push("(4) local periodicity", tok, tdetail);
  }

  rep.pass = true;
  for (const auto& c : rep.checks) rep.pass = rep.pass && c.pass;
  return rep;
}

VerificationReport verify_restriction(const Family& original, const RestrictedFamily& res,
                                      const ResidueSet& lam_q,
                                      const std::vector<std::vector<i64>>& sigmas,
                                      const SequenceSpec& seq, PsiOracle& psi) {
  VerificationReport rep;
  auto push = [&](const std::string& name, bool pass, const std::string& detail) {
    rep.checks.push_back({name, pass, detail});
  };
  const Family& bar = res.barred;
  const Rat gamma = original.params.gamma;
  const i64 q = lam_q.modulus;

  // (1bar): E fbar_h <= gamma E f_h
  {
    bool ok = true;
    std::string detail;
    for (std::size_t h = 0; h < bar.f.size(); ++h) {
      const Rat lhs = bar.f[h].mean();
      const Rat rhs = gamma * original.f[h].mean();
      detail += (h ? "; " : "") + rat_str(lhs) + " <= " + rat_str(rhs);
      if (!(lhs <= rhs)) ok = false;
      if (!bar.f[h].nonnegative()) ok = false;
    }
    push("(1bar) restricted means", ok, detail);
  }

  const i64 rtbar = bar.RT();
  if (rtbar > bar.params.rt_cap)
    throw std::runtime_error("verify_restriction: R*Tbar beyond cap");

  std::vector<std::uint8_t> in_neg(static_cast<std::size_t>(q), 0);
  for (i64 x : res.neg_gamma) in_neg[static_cast<std::size_t>(x)] = 1;

  // (2bar): conditional distributions on each q-periodic Sigma equal the
  // original distributions; conditional pairwise joints factor
  {
    bool ok = true;
    std::string detail;
    for (const auto& sigma : sigmas) {
      std::vector<std::uint8_t> in_sigma(static_cast<std::size_t>(q), 0);
      for (i64 s : sigma) {
        if (!in_neg[static_cast<std::size_t>(((s % q) + q) % q)]) {
          ok = false;
          detail = "Sigma not inside (-Lambda_q)^gamma";
        }
        in_sigma[static_cast<std::size_t>(((s % q) + q) % q)] = 1;
      }
      if (!ok) break;
      i64 sigma_count = 0;
      std::vector<XEval> evals;
      for (const auto& x : bar.X) evals.emplace_back(x);
      std::vector<std::map<Rat, i64>> cond(bar.X.size());
      std::map<std::pair<Rat, Rat>, i64> joint01;
      for (i64 x = 0; x < rtbar; ++x) {
        if (!in_sigma[static_cast<std::size_t>(x % q)]) continue;
        ++sigma_count;
        for (std::size_t h = 0; h < bar.X.size(); ++h) ++cond[h][evals[h].at(x)];
        if (bar.X.size() >= 2)
          ++joint01[{evals[0].at(x), evals[1].at(x)}];
      }
      if (sigma_count == 0) {
        ok = false;
        detail = "empty Sigma";
        break;
      }
      for (std::size_t h = 0; h < bar.X.size() && ok; ++h) {
        std::vector<std::pair<Rat, Rat>> got;
        for (const auto& [v, c] : cond[h]) got.emplace_back(v, rat_of(c, sigma_count));
        std::string why;
        if (!same_distribution(got, original.X[h].distribution(bar.params.rt_cap),
                               &why)) {
          ok = false;
          detail = "E(Xbar_" + std::to_string(h + 1) + "|Sigma) != X_" +
                   std::to_string(h + 1) + ": " + why;
        }
      }
      if (ok && bar.X.size() >= 2) {
        for (const auto& [pairv, c] : joint01) {
          const i64 c0 = cond[0][pairv.first];
          const i64 c1 = cond[1][pairv.second];
          if (static_cast<__int128>(c) * sigma_count !=
              static_cast<__int128>(c0) * c1) {
            ok = false;
            detail = "conditional joint does not factor on Sigma";
            break;
          }
        }
      }
      if (!ok) break;
    }
    push("(2bar) conditional distributions", ok, detail);
  }

  // (3bar): P(Ebar) <= delta P((-Lambda_q)^gamma)
  {
    const Rat pe = bar.e_measure();
    const Rat bound = original.params.delta *
                      rat_of(static_cast<i64>(res.neg_gamma.size()), q);
    push("(3bar) exceptional measure", pe <= bound,
         "P(Ebar) = " + rat_str(pe) + " vs " + rat_str(bound));
  }

  // (4bar): averaging bound with Qbar and local periodicity over psi(Abar Qbar)
  {
    const auto avg = joker_averages(bar, seq);
    std::vector<XEval> evals;
    for (const auto& x : bar.X) evals.emplace_back(x);
    bool ok = true;
    std::string detail;
    for (i64 x = 0; x < rtbar && ok; ++x) {
      const i64 u = x % bar.T;
      if (bar.E[static_cast<std::size_t>(u)]) continue;
      for (std::size_t h = 0; h < bar.X.size(); ++h) {
        const Rat& xv = evals[h].at(x);
        if (avg[h][static_cast<std::size_t>(u)] < xv) {
          ok = false;
          detail = "barred joker fails at x=" + std::to_string(x) + " h=" +
                   std::to_string(h + 1);
          break;
        }
      }
    }
    push("(4bar) averaging bound", ok, detail);

    bool tok = true;
    std::string tdetail;
    for (i64 vi = 0; vi < static_cast<i64>(bar.q_values.size()) && tok; ++vi) {
      const i64 qv = bar.q_values[static_cast<std::size_t>(vi)];
      const i64 hi = psi.psi(bar.params.A * qv);
      bool all_periodic = true;
      for (const auto& f : bar.f)
        if (!f.has_period(qv)) all_periodic = false;
      if (all_periodic || hi < qv) continue;
      for (i64 u = 0; u < bar.T && tok; ++u) {
        if (bar.E[static_cast<std::size_t>(u)]) continue;
        if (bar.q_idx[static_cast<std::size_t>(u)] != vi) continue;
        for (const auto& f : bar.f)
          for (i64 y = qv; y <= hi; ++y)
            if (f.index_at(u + y - qv) != f.index_at(u + y)) {
              tok = false;
              tdetail = "barred thief fails at x=" + std::to_string(u);
              break;
            }
      }
    }
    push("(4bar) local periodicity", tok, tdetail);
  }

  rep.pass = true;
  for (const auto& c : rep.checks) rep.pass = rep.pass && c.pass;
  return rep;
}

nlohmann::json MaximalReport::to_json() const {
  nlohmann::json j;
  j["worth_all_pass"] = worth_all_pass;
  j["worth_checked"] = worth_checked;
  j["worth_violations"] = worth_violations;
  if (first_violation)
    j["first_violation"] = {{"x", first_violation->x},
                            {"detail", first_violation->detail}};
  j["full_enumeration"] = full_enumeration;
  j["sample_count"] = sample_count;
  j["weak_norm_sup"] = rat_str(weak_norm_sup);
  j["E_f"] = rat_str(e_f);
  j["ratio"] = rat_str(ratio);
  j["E_X"] = rat_str(e_x);
  j["chebyshev_bound"] = chebyshev_bound;
  j["empirical_tail"] = rat_str(empirical_tail);
  j["n_cap"] = n_cap;
  nlohmann::json psij = nlohmann::json::array();
  for (const auto& [qv, pv] : psi_by_q) psij.push_back({{"Q", qv}, {"psi", pv}});
  j["psi_by_Q"] = psij;
  return j;
}

MaximalReport demo_maximal(const Family& fam, const SequenceSpec& seq, PsiOracle& psi,
                           i64 sample_target, i64 n_cap) {
  MaximalReport rep;
  rep.n_cap = n_cap;
  const StepParams& pr = fam.params;
  const i64 rt = fam.RT();

  // f = sum_h f_h, reduced to its minimal period for the A_N tables
  std::vector<const PeriodicFunction*> fps;
  for (const auto& f : fam.f) fps.push_back(&f);
  const PeriodicFunction f_total = PeriodicFunction::sum(fps, fam.T);
  const PeriodicFunction f_red = f_total.reduced();
  const i64 P = f_red.period();

  rep.e_f = f_total.mean();

  // psi(Q) and per-class counts of n_k mod P at N = psi(Q)
  std::map<i64, i64> psi_of;
  std::map<i64, std::vector<Rat>> a_n_table;  // Q value -> A_{psi(Q)} f on Z_P
  for (i64 qv : fam.q_values) {
    const i64 nv = psi.psi(qv);
    psi_of[qv] = nv;
    rep.psi_by_q.emplace_back(qv, nv);
    std::vector<i64> cnt(static_cast<std::size_t>(P), 0);
    for_each_term_mod(seq, P, nv, [&](i64, i64 r) { ++cnt[static_cast<std::size_t>(r)]; });
    std::vector<Rat> row;
    row.reserve(static_cast<std::size_t>(P));
    for (i64 u = 0; u < P; ++u) {
      // group by value index to keep the rational arithmetic short
      std::vector<i64> by_idx(f_red.table().size(), 0);
      for (i64 c = 0; c < P; ++c)
        by_idx[f_red.index_at(u + c)] += cnt[static_cast<std::size_t>(c)];
      Rat acc(0);
      for (std::size_t i = 0; i < by_idx.size(); ++i)
        if (by_idx[i]) acc += f_red.table()[i] * rat_of(by_idx[i]);
      row.push_back(acc / rat_of(nv));
    }
    a_n_table.emplace(qv, std::move(row));
  }

  // joker-average of the sum, per u in Z_T
  const auto avg_each = joker_averages(fam, seq);
  std::vector<Rat> avg_sum(static_cast<std::size_t>(fam.T), Rat(0));
  for (i64 u = 0; u < fam.T; ++u) {
    Rat acc(0);
    for (std::size_t h = 0; h < avg_each.size(); ++h)
      acc += avg_each[h][static_cast<std::size_t>(u)];
    avg_sum[static_cast<std::size_t>(u)] = acc;
  }

  std::vector<XEval> evals;
  for (const auto& x : fam.X) evals.emplace_back(x);

  // (worth) check: full enumeration when RT fits the cap, else stride
  rep.full_enumeration = rt <= pr.rt_cap;
  const i64 stride = rep.full_enumeration
                         ? 1
                         : std::max<i64>(1, rt / std::max<i64>(sample_target, 1));
  for (i64 x = 0; x < rt; x += stride) {
    const i64 u = x % fam.T;
    if (fam.E[static_cast<std::size_t>(u)]) continue;
    ++rep.worth_checked;
    const i64 qv = fam.Qx(u);
    const Rat& lhs = a_n_table.at(qv)[static_cast<std::size_t>(u % P)];
    const Rat mid = pr.beta * avg_sum[static_cast<std::size_t>(u)];
    Rat xsum(0);
    for (auto& e : evals) xsum += e.at(x);
    const bool pass1 = lhs > mid;
    const bool pass2 = avg_sum[static_cast<std::size_t>(u)] >= xsum;
    if (!(pass1 && pass2)) {
      ++rep.worth_violations;
      if (!rep.first_violation) {
        WorthWitness w;
        w.x = x;
        w.detail = "A_N f = " + rat_str(lhs) + ", beta*avg = " + rat_str(mid) +
                   ", X = " + rat_str(xsum) + ", N = " + std::to_string(psi_of[qv]);
        rep.first_violation = w;
      }
    }
  }
  rep.worth_all_pass = rep.worth_violations == 0;

  // capped sup statistics: sup_{N in S, N <= n_cap} A_N f depends on x mod P
  {
    // common denominator of the reduced table keeps running sums integral
    Int den(1);
    for (const Rat& v : f_red.table()) {
      Int d(v.get_den());
      mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), d.get_mpz_t());
    }
    std::vector<i64> scaled(f_red.table().size());
    i64 max_scaled = 0;
    for (std::size_t i = 0; i < scaled.size(); ++i) {
      scaled[i] = to_i64(Int(f_red.table()[i].get_num() *
                             (den / Int(f_red.table()[i].get_den()))));
      max_scaled = std::max(max_scaled, std::abs(scaled[i]));
    }
    if (max_scaled > 0 && n_cap > (1ll << 62) / (max_scaled + 1))
      throw std::runtime_error("demo_maximal: sup accumulator would overflow");
    std::vector<i64> nk_mod(static_cast<std::size_t>(n_cap));
    for_each_term_mod(seq, P, n_cap,
                      [&](i64 k, i64 r) { nk_mod[static_cast<std::size_t>(k - 1)] = r; });
    std::vector<Rat> sup_vals;
    sup_vals.reserve(static_cast<std::size_t>(P));
    for (i64 u = 0; u < P; ++u) {
      i64 run = 0;
      i64 best_num = 0;
      i64 best_n = 1;
      for (i64 k = 1; k <= n_cap; ++k) {
        run += scaled[f_red.index_at(u + nk_mod[static_cast<std::size_t>(k - 1)])];
        if (!pr.S.member(k)) continue;
        // run/k > best_num/best_n
        if (static_cast<__int128>(run) * best_n >
            static_cast<__int128>(best_num) * k) {
          best_num = run;
          best_n = k;
        }
      }
      sup_vals.push_back(rat_of(best_num) / (rat_of(best_n) * Rat(den)));
    }
    const PeriodicFunction sup_fn = PeriodicFunction::from_values(sup_vals);
    rep.weak_norm_sup = weak_norm(sup_fn);
    rep.ratio = rep.weak_norm_sup / rep.e_f;
    const i64 out_stride = std::max<i64>(1, P / std::max<i64>(sample_target, 1));
    for (i64 u = 0; u < P; u += out_stride)
      rep.sup_samples.emplace_back(u, sup_vals[static_cast<std::size_t>(u)]);
    rep.sample_count = static_cast<i64>(rep.sup_samples.size());
  }

  // tail figures
  {
    Rat ex(0);
    for (const auto& x : fam.X) ex += x.mean(pr.rt_cap);
    rep.e_x = ex;
    const double c = pr.C.get_d();
    const double a = pr.alpha.get_d();
    rep.chebyshev_bound = 8.0 * std::exp(2.0 * c) / (a * a * c * c * pr.K);
    const Rat tail_level = pr.C * pr.alpha * pr.alpha / 2 * rat_of(pr.K);
    i64 below = 0, total = 0;
    const i64 tail_stride = rep.full_enumeration ? 1 : stride;
    for (i64 x = 0; x < rt; x += tail_stride) {
      Rat xsum(0);
      for (auto& e : evals) xsum += e.at(x);
      ++total;
      if (xsum <= tail_level) ++below;
    }
    rep.empirical_tail = rat_of(below, total);
  }
  return rep;
}

void write_maximal_csv(std::ostream& os, const MaximalReport& rep) {
  os << "x,sup_A_N_f\n";
  for (const auto& [x, v] : rep.sup_samples) os << x << "," << v.get_d() << "\n";
}

}  // namespace subavg
