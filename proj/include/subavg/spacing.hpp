#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "subavg/rational.hpp"
#include "subavg/residue.hpp"

namespace subavg {

// Normalized circular gap structure of a residue set.
//
// Points y_i = lambda_i / s_t live on the circle R/NZ with N = |Lambda|.
// Internally everything is scaled by t so that distances stay integral:
// Y_i = lambda_i * |Lambda| on a circle of circumference N*t.
struct SpacingProfile {
  i64 modulus = 1;        // t
  i64 count = 0;          // N = |Lambda|
  std::vector<i64> scaled_points;  // lambda_i * N, increasing
  std::vector<i64> scaled_gaps;    // circular successor gaps, sum = N*t

  static SpacingProfile from(const ResidueSet& lam);

  Rat point(std::size_t i) const { return rat_of(scaled_points[i], modulus); }
  Rat gap(std::size_t i) const { return rat_of(scaled_gaps[i], modulus); }
};

// F(theta): fraction of circular gaps strictly greater than theta. Exact.
Rat gap_cdf(const SpacingProfile& profile, const Rat& theta);

// Both sides of the discrete thickened-measure identity:
// |Lambda^gamma| and sum_i min(circular gap_i, m). They must be equal.
std::pair<i64, i64> thickened_measure_identity(const ResidueSet& lam, const Rat& gamma);

// zeta_l(theta): fraction of i with circular |y_i - y_l - y_k| > theta for
// every k. l is 1-based. Distances on the circle of circumference |Lambda|.
Rat zeta(const SpacingProfile& profile, std::size_t l, const Rat& theta);

struct PoissonLemmaReport {
  Rat theta, J;
  Rat lhs;       // P_l( zeta_l(theta) > (F(J theta)+F(2 theta)-1)/2 )
  Rat lhs_weak;  // same with >= instead of >
  Rat rhs;       // F(2 theta) - F((J-2) theta)
  bool pass = false;         // displayed form: lhs >= rhs
  bool pass_proved = false;  // lhs_weak >= rhs/2, which the 2-to-1 counting
                             // argument actually yields; holds for every
                             // strictly increasing sequence
};

// Precomputed per-(i,l) nearest-point distances, so a theta/J grid can be
// evaluated without re-walking the profile each time.
class ZetaTable {
 public:
  explicit ZetaTable(const SpacingProfile& profile);
  // zeta_l(theta) for 1-based l, exact.
  Rat zeta(std::size_t l, const Rat& theta) const;
  PoissonLemmaReport check(const Rat& theta, const Rat& J) const;

 private:
  SpacingProfile profile_;
  std::vector<std::vector<i64>> sorted_dist_;  // per l: sorted scaled min-distances
};

// The gap-statistics inequality holds for every strictly increasing set;
// a failure here is a defect, not data.
PoissonLemmaReport poisson_lemma_check(const SpacingProfile& profile, const Rat& theta,
                                       const Rat& J);

// |{(u,v) in Lambda x Lambda : circular |u-v-w| > gamma*s_q for all w}|.
i64 condition_earth_count(const ResidueSet& lam, const Rat& gamma);

// Per-instance value of gamma - P(Lambda^gamma).
Rat condition_wine_epsilon(const ResidueSet& lam, const Rat& gamma);

enum class ConditionId { kWind, kHowl, kWine, kEarth };

struct ConditionReport {
  ConditionId id;
  std::vector<Rat> values;
  Rat threshold;
  Rat epsilon_gamma;  // for kWine
  bool pass = false;
};

ConditionReport report_wine(const ResidueSet& lam, const Rat& gamma, const Rat& epsilon);
ConditionReport report_earth(const ResidueSet& lam, const Rat& gamma, const Rat& alpha);

// CSV rows (theta, F_q(theta), e^-theta). The exponential column is the
// only floating-point quantity in the module; tolerance 1e-12 applies to it.
void write_gap_cdf_csv(std::ostream& os, const SpacingProfile& profile,
                       const std::vector<Rat>& thetas);

}  // namespace subavg
