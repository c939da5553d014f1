#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "subavg/equidist.hpp"
#include "subavg/function.hpp"
#include "subavg/rational.hpp"
#include "subavg/rearrange.hpp"
#include "subavg/residue.hpp"

namespace subavg {

// Exact atom map of the prescribed distribution Y_{n,gamma,alpha}.
struct YDistribution {
  i64 n = 0;
  Rat gamma, alpha;
  std::vector<std::pair<Rat, Rat>> atoms;  // (value, probability), values increasing

  Rat mean() const;
  Rat mean_square() const;
  Rat probability_sum() const;
};

YDistribution y_distribution(i64 n, const Rat& gamma, const Rat& alpha);

// Scalar parameter pack of a construction step.
struct StepParams {
  int K = 1, M = 0, L = 0;
  Rat gamma = rat(1, 4);
  Rat alpha = rat(1, 32);
  Rat beta = rat(2, 5);
  Rat delta = rat(1, 4);
  Rat epsilon = rat(1, 8);  // per-instance stand-in for eps_gamma; delta < 8*epsilon
  i64 A = 1;
  i64 D = 1;
  Rat C = rat(1);  // demo target constant, reporting only
  SubsetRule S;
  Rat gamma0 = rat(1, 2);
  i64 t_cap = 10'000'000;
  i64 rt_cap = 100'000'000;
  i64 scan_horizon = 1'000'000;

  void validate() const;
  nlohmann::json to_json() const;
  static StepParams from_json(const nlohmann::json& j);
};

// One multiplicative factor of an X-term: membership is tested after
// applying the recorded block-shift warps (outermost first).
struct XFactor {
  std::vector<RearrangementPlan> warps;
  bool is_interval = false;
  i64 modulus = 1;  // interval form: (warped x) mod modulus < bound
  i64 bound = 1;
  i64 bitmap_period = 1;  // bitmap form
  std::vector<std::uint8_t> bitmap;

  bool pass(i64 x) const;
  static XFactor interval(i64 modulus, i64 bound);
  static XFactor set(const std::vector<i64>& members, i64 period);
};

struct XTerm {
  Rat coeff;
  std::vector<XFactor> factors;
  bool pass(i64 x) const;
};

// Exact rational function on Z_{R*T} kept in product form: a sum of
// coefficient-times-indicator terms. Periods beyond the enumeration cap
// stay evaluable pointwise.
class XFunction {
 public:
  XFunction() = default;
  static XFunction constant(const Rat& c);

  i64 period() const { return period_; }
  void set_period(i64 p) { period_ = p; }
  const std::vector<XTerm>& terms() const { return terms_; }
  std::vector<XTerm>& terms() { return terms_; }

  Rat at(i64 x) const;
  Rat mean(i64 enumeration_cap) const;
  // exact histogram over Z_period; throws when period > cap
  std::vector<std::pair<Rat, Rat>> distribution(i64 enumeration_cap) const;
  // wrap every existing factor with a new outer warp (used when the family
  // is rearranged) and return the lifted function on Z_{p * period}
  XFunction warped(const RearrangementPlan& plan) const;
  XFunction scaled(const Rat& c) const;
  XFunction with_factor(const XFactor& f) const;
  XFunction plus(const XFunction& other) const;
  PeriodicFunction materialize(i64 cap) const;

 private:
  i64 period_ = 1;
  std::vector<XTerm> terms_;
};

// Phi/Psi/Delta selection for one q, with the (soul) integers.
struct PartitionSets {
  i64 q = 1;
  std::vector<i64> phi;       // subset of -Lambda_q
  std::vector<i64> phi_gamma; // Phi^gamma
  std::vector<i64> psi_set;   // Psi_q
  std::vector<i64> filler;    // F added to the complement to form Delta_q
  std::vector<std::uint8_t> delta_bitmap;  // mod q
  i64 delta_size = 0;
  i64 r = 1, s = 1, t = 1;

  Rat p_delta() const { return rat_of(delta_size, q); }
  Rat p_psi() const { return rat_of(static_cast<i64>(psi_set.size()), q); }
  bool in_delta(i64 x) const {
    return delta_bitmap[static_cast<std::size_t>(((x % q) + q) % q)] != 0;
  }
};

struct SelectOutcome {
  bool ok = false;
  PartitionSets parts;
  std::vector<std::string> failures;  // which of (second)..(minute) failed
};

// Builds Phi_q, Psi_q, Delta_q and the (soul) integers for a q that the
// caller has already size/wine/earth-checked. Filler and Psi sizes are
// chosen to keep gcd(.,D)=1 and to minimize r within the delta/8 budget.
SelectOutcome select_partition_sets(const ResidueSet& lam_q, const StepParams& params);

// The (K,M,L) package.
struct Family {
  StepParams params;
  i64 T = 1;
  i64 R = 1;
  std::vector<PeriodicFunction> f;  // K entries, period T
  std::vector<XFunction> X;         // K entries, period R*T
  std::vector<std::uint8_t> E;      // bitmap mod T
  std::vector<i64> q_values;        // distinct Q_x values (members of Qset)
  std::vector<std::uint8_t> q_idx;  // per x mod T

  int K() const { return params.K; }
  i64 RT() const { return R * T; }
  i64 Qx(i64 x) const {
    i64 r = x % T;
    if (r < 0) r += T;
    return q_values[q_idx[static_cast<std::size_t>(r)]];
  }
  bool in_E(i64 x) const {
    i64 r = x % T;
    if (r < 0) r += T;
    return E[static_cast<std::size_t>(r)] != 0;
  }
  Rat e_measure() const;
  void validate_structure() const;
};

// Step (1,M,0): T = R = 1, f_1 = X_1 = 1, E empty, Q_x = 1.
Family trivial_step_family(const StepParams& params);

// Step (K-1,M,M) -> Step (K,M,0): append f_K = X_K = 1.
Family extend_family(const Family& fam);

// Lemma-style restriction of a family onto (-Lambda_q)^gamma.
struct RestrictedFamily {
  Family barred;          // f-bar, X-bar, E-bar, Q-bar on Z_{qBT}
  i64 q = 1, B = 1;
  std::vector<i64> xi_gamma;     // (0, gamma s_q) + qZ, as residues mod q
  std::vector<i64> neg_gamma;    // (-Lambda_q)^gamma mod q
};

RestrictedFamily restrict_family(const Family& fam, const ResidueSet& lam_q, i64 B,
                                 PsiOracle& psi);

// Exact check that the last function passes the Psi-average bound at level
// alpha for a modulus Q divisible by q*p*T.
bool fate_check(const PeriodicFunction& f, const std::vector<i64>& psi_set, i64 q,
                const ResidueSet& lam_Q, const Rat& alpha);

struct StepInputs {
  const Family* base = nullptr;        // (K,M,L)
  const Family* ingredient = nullptr;  // (K-1,M,M), nullptr when K = 1
  i64 p = 1;
  ResidueSet lam_q;
  RearrangementPlan plan;  // certified by find_good_omega
  PartitionSets parts;
  PsiOracle* psi = nullptr;
  SequenceSpec seq;
};

struct StepResult {
  bool ok = false;
  Family family;
  std::vector<std::string> diagnostics;
  nlohmann::json log;
};

// One (K,M,L) -> (K,M,L+1) assembly. Post-assembly measure and structural
// checks run before the family is returned; failures come back as
// diagnostics, never silently.
StepResult inductive_step(const StepInputs& in);

struct BuildConfig {
  int K = 1, M = 1;
  int target_L = -1;  // default M
  StepParams params;
  QsetCatalog pools;
  SequenceSpec seq;
  std::uint64_t seed = 1;
  i64 omega_budget = 10'000;
  bool keep_intermediates = false;
};

struct BuildResult {
  bool ok = false;
  Family family;
  std::vector<Family> intermediates;
  nlohmann::json log;
  std::string error;
};

BuildResult build_family(const BuildConfig& cfg);

// Serialization (CBOR container with full provenance).
std::vector<std::uint8_t> family_to_cbor(const Family& fam, const nlohmann::json& log);
Family family_from_cbor(const std::vector<std::uint8_t>& data, nlohmann::json* log_out);

}  // namespace subavg
