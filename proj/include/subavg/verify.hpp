#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "subavg/equidist.hpp"
#include "subavg/family.hpp"
#include "subavg/function.hpp"
#include "subavg/rational.hpp"
#include "subavg/residue.hpp"

namespace subavg {

// Exact average of f over {x+a : a in Lambda_Q, 1 <= a <= Q}.
Rat residue_average(const PeriodicFunction& f, const ResidueSet& lam_Q, i64 x);

// Exact (1/N) sum_{k<=N} f(x + n_k).
Rat subsequence_average(const PeriodicFunction& f, const SequenceSpec& seq, i64 n, i64 x);

// max over distinct values lambda of |g| of lambda * P(|g| >= lambda).
Rat weak_norm(const PeriodicFunction& g);

struct PropertyCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct VerificationReport {
  bool pass = false;
  std::vector<PropertyCheck> checks;
  nlohmann::json to_json() const;
};

// Exact verification of the four step properties plus structure.
VerificationReport verify_family(const Family& fam, const SequenceSpec& seq,
                                 PsiOracle& psi);

// Exact joint-histogram factorization over Z_N.
bool pairwise_independence_check(const XFunction& a, const XFunction& b, i64 n, i64 cap);

// Restriction verification: properties (1bar)..(4bar) plus conditional
// distribution equality on the supplied q-periodic sigma sets.
VerificationReport verify_restriction(const Family& original, const RestrictedFamily& res,
                                      const ResidueSet& lam_q,
                                      const std::vector<std::vector<i64>>& sigmas,
                                      const SequenceSpec& seq, PsiOracle& psi);

struct WorthWitness {
  i64 x = -1;
  std::string detail;
};

struct MaximalReport {
  bool worth_all_pass = false;
  i64 worth_checked = 0;
  i64 worth_violations = 0;
  std::optional<WorthWitness> first_violation;
  bool full_enumeration = false;  // else stride sampling
  i64 sample_count = 0;
  Rat weak_norm_sup;   // exact over the enumerated domain
  Rat e_f;             // E f
  Rat ratio;           // weak_norm_sup / E f
  Rat e_x;             // E X = sum_h E X_h
  double chebyshev_bound = 0.0;      // 8 e^{2C} / (alpha^2 C^2 K)
  Rat empirical_tail;                // P( sum X_h / K <= C alpha^2 / 2 )
  i64 n_cap = 0;
  std::vector<std::pair<i64, i64>> psi_by_q;  // (Q_x value, psi(Q_x))
  nlohmann::json to_json() const;
  // per-sample rows (x, sup A_N f(x)) for the CSV emitter
  std::vector<std::pair<i64, Rat>> sup_samples;
};

// Evaluates the two-step averaging bound at N = psi(Q_x) for every
// enumerated x off E, plus the capped sup statistics and the tail figures.
MaximalReport demo_maximal(const Family& fam, const SequenceSpec& seq, PsiOracle& psi,
                           i64 sample_target, i64 n_cap);

void write_maximal_csv(std::ostream& os, const MaximalReport& rep);

}  // namespace subavg
