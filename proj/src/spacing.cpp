#include "subavg/spacing.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace subavg {

SpacingProfile SpacingProfile::from(const ResidueSet& lam) {
  lam.validate();
  if (lam.elements.empty()) throw std::invalid_argument("empty residue set");
  SpacingProfile p;
  p.modulus = lam.modulus;
  p.count = static_cast<i64>(lam.size());
  p.scaled_points.reserve(lam.size());
  for (i64 l : lam.elements) p.scaled_points.push_back(l * p.count);
  p.scaled_gaps.reserve(lam.size());
  for (std::size_t i = 0; i < lam.size(); ++i) {
    i64 next = (i + 1 < lam.size()) ? p.scaled_points[i + 1]
                                    : p.scaled_points[0] + p.count * p.modulus;
    p.scaled_gaps.push_back(next - p.scaled_points[i]);
  }
  return p;
}

namespace {

// scaled value v (units of 1/t) > theta, exact via cross multiplication
bool scaled_exceeds(i64 v, i64 t, const Rat& theta) {
  if (theta.get_num().fits_slong_p() && theta.get_den().fits_slong_p()) {
    const i64 num = theta.get_num().get_si();
    const i64 den = theta.get_den().get_si();
    return static_cast<__int128>(v) * den > static_cast<__int128>(num) * t;
  }
  return rat_of(v, t) > theta;
}

bool gap_exceeds(i64 scaled_gap, const Rat& theta, i64 t) {
  return scaled_exceeds(scaled_gap, t, theta);
}

}  // namespace

Rat gap_cdf(const SpacingProfile& profile, const Rat& theta) {
  if (theta < 0) throw std::invalid_argument("gap_cdf: theta must be >= 0");
  i64 cnt = 0;
  for (i64 g : profile.scaled_gaps)
    if (gap_exceeds(g, theta, profile.modulus)) ++cnt;
  return rat_of(cnt, profile.count);
}

std::pair<i64, i64> thickened_measure_identity(const ResidueSet& lam, const Rat& gamma) {
  const i64 lhs = static_cast<i64>(thicken(lam, gamma).size());
  const i64 m = thicken_offsets(lam, gamma);
  i64 rhs = 0;
  const std::size_t n = lam.size();
  for (std::size_t i = 0; i < n; ++i) {
    i64 next = (i + 1 < n) ? lam.elements[i + 1] : lam.elements[0] + lam.modulus;
    rhs += std::min(next - lam.elements[i], m);
  }
  return {lhs, rhs};
}

Rat zeta(const SpacingProfile& profile, std::size_t l, const Rat& theta) {
  const std::size_t n = static_cast<std::size_t>(profile.count);
  if (l < 1 || l > n) throw std::out_of_range("zeta: l out of range");
  // circle of circumference N (scaled by t: N*t)
  const i64 circ = profile.count * profile.modulus;
  const i64 yl = profile.scaled_points[l - 1];
  i64 cnt = 0;
  for (std::size_t i = 0; i < n; ++i) {
    i64 z = ((profile.scaled_points[i] - yl) % circ + circ) % circ;
    // min circular distance from z to the point set
    auto it = std::lower_bound(profile.scaled_points.begin(), profile.scaled_points.end(), z);
    i64 best = circ;
    auto probe = [&](i64 y) {
      i64 d = std::abs(z - y);
      best = std::min({best, d, circ - d});
    };
    if (it != profile.scaled_points.end()) probe(*it);
    if (it != profile.scaled_points.begin()) probe(*(it - 1));
    probe(profile.scaled_points.front());
    probe(profile.scaled_points.back());
    if (scaled_exceeds(best, profile.modulus, theta)) ++cnt;
  }
  return rat_of(cnt, profile.count);
}

ZetaTable::ZetaTable(const SpacingProfile& profile) : profile_(profile) {
  const std::size_t n = static_cast<std::size_t>(profile.count);
  const i64 circ = profile.count * profile.modulus;
  const auto& pts = profile.scaled_points;
  sorted_dist_.assign(n, std::vector<i64>(n));
  for (std::size_t l = 0; l < n; ++l) {
    for (std::size_t i = 0; i < n; ++i) {
      i64 z = ((pts[i] - pts[l]) % circ + circ) % circ;
      auto it = std::lower_bound(pts.begin(), pts.end(), z);
      i64 best = circ;
      auto probe = [&](i64 y) {
        i64 d = std::abs(z - y);
        best = std::min({best, d, circ - d});
      };
      if (it != pts.end()) probe(*it);
      if (it != pts.begin()) probe(*(it - 1));
      probe(pts.front());
      probe(pts.back());
      sorted_dist_[l][i] = best;
    }
    std::sort(sorted_dist_[l].begin(), sorted_dist_[l].end());
  }
}

Rat ZetaTable::zeta(std::size_t l, const Rat& theta) const {
  const std::size_t n = sorted_dist_.size();
  if (l < 1 || l > n) throw std::out_of_range("zeta: l out of range");
  const auto& ds = sorted_dist_[l - 1];
  // count d with d/t > theta; ds sorted, so binary search on the boundary
  auto lo = std::partition_point(ds.begin(), ds.end(), [&](i64 d) {
    return !scaled_exceeds(d, profile_.modulus, theta);
  });
  return rat_of(static_cast<i64>(ds.end() - lo), profile_.count);
}

PoissonLemmaReport ZetaTable::check(const Rat& theta, const Rat& J) const {
  if (theta <= 0) throw std::invalid_argument("poisson_lemma_check: theta must be > 0");
  if (J <= 4) throw std::invalid_argument("poisson_lemma_check: J must be > 4");
  PoissonLemmaReport rep;
  rep.theta = theta;
  rep.J = J;
  const Rat fj = gap_cdf(profile_, J * theta);
  const Rat f2 = gap_cdf(profile_, 2 * theta);
  const Rat fj2 = gap_cdf(profile_, (J - 2) * theta);
  const Rat bar = (fj + f2 - 1) / 2;
  const std::size_t n = sorted_dist_.size();
  i64 cnt = 0, cnt_weak = 0;
  for (std::size_t l = 1; l <= n; ++l) {
    const Rat z = zeta(l, theta);
    if (z > bar) ++cnt;
    if (z >= bar) ++cnt_weak;
  }
  rep.lhs = rat_of(cnt, profile_.count);
  rep.lhs_weak = rat_of(cnt_weak, profile_.count);
  rep.rhs = f2 - fj2;
  rep.pass = rep.lhs >= rep.rhs;
  rep.pass_proved = rep.lhs_weak >= rep.rhs / 2;
  return rep;
}

PoissonLemmaReport poisson_lemma_check(const SpacingProfile& profile, const Rat& theta,
                                       const Rat& J) {
  return ZetaTable(profile).check(theta, J);
}

i64 condition_earth_count(const ResidueSet& lam, const Rat& gamma) {
  if (gamma <= 0 || gamma >= 1) throw std::invalid_argument("gamma must be in (0,1)");
  const i64 q = lam.modulus;
  const Rat gs = gamma * lam.mean_spacing();
  // precompute min circular distance to Lambda for every difference we meet
  i64 cnt = 0;
  for (i64 u : lam.elements) {
    for (i64 v : lam.elements) {
      i64 d = lam.min_circular_distance(((u - v) % q + q) % q);
      if (rat_of(d) > gs) ++cnt;
    }
  }
  return cnt;
}

Rat condition_wine_epsilon(const ResidueSet& lam, const Rat& gamma) {
  const i64 sz = static_cast<i64>(thicken(lam, gamma).size());
  return gamma - rat_of(sz, lam.modulus);
}

ConditionReport report_wine(const ResidueSet& lam, const Rat& gamma, const Rat& epsilon) {
  ConditionReport rep;
  rep.id = ConditionId::kWine;
  rep.epsilon_gamma = condition_wine_epsilon(lam, gamma);
  rep.values = {rep.epsilon_gamma};
  rep.threshold = epsilon;
  rep.pass = rep.epsilon_gamma <= epsilon;
  return rep;
}

ConditionReport report_earth(const ResidueSet& lam, const Rat& gamma, const Rat& alpha) {
  ConditionReport rep;
  rep.id = ConditionId::kEarth;
  const i64 cnt = condition_earth_count(lam, gamma);
  rep.values = {rat_of(cnt)};
  rep.threshold = 5 * alpha * rat_of(static_cast<i64>(lam.size())) *
                  rat_of(static_cast<i64>(lam.size()));
  rep.pass = rep.values[0] >= rep.threshold;
  return rep;
}

void write_gap_cdf_csv(std::ostream& os, const SpacingProfile& profile,
                       const std::vector<Rat>& thetas) {
  os << "theta,F_q,exp_neg_theta\n";
  for (const Rat& th : thetas) {
    const Rat f = gap_cdf(profile, th);
    os << th.get_d() << "," << f.get_d() << "," << std::exp(-th.get_d()) << "\n";
  }
}

}  // namespace subavg
