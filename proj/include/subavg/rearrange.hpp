#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "subavg/function.hpp"
#include "subavg/rational.hpp"
#include "subavg/residue.hpp"

namespace subavg {

// Block-shift rearrangement of Z_pT: floor(sqrt p) blocks of length
// floor(sqrt p)*T, each shifted by xi_i, plus an unshifted tail.
struct RearrangementPlan {
  i64 T = 1;
  i64 p = 1;
  std::vector<i64> shifts;  // size floor(sqrt p), entries in [0, T)

  i64 root() const { return static_cast<i64>(shifts.size()); }
  i64 block_len() const { return root() * T; }
  i64 tail_start() const { return root() * block_len(); }
  i64 period() const { return p * T; }

  void validate() const;

  // The source position the rearranged function reads from: x + xi_i on
  // block i, x on the tail. Argument taken mod pT.
  i64 warp(i64 x) const {
    i64 r = x % period();
    if (r < 0) r += period();
    if (r >= tail_start()) return x;
    return x + shifts[static_cast<std::size_t>(r / block_len())];
  }

  std::string to_json() const;
  static RearrangementPlan from_json(const std::string& text);
};

// f on Z_T -> rearranged function on Z_pT.
PeriodicFunction apply_rearrangement(const PeriodicFunction& f,
                                     const RearrangementPlan& plan);

// Same block structure applied to a function of period R*T (R coprime to p);
// the result has period p*R*T.
PeriodicFunction apply_rearrangement_lifted(const PeriodicFunction& f,
                                            const RearrangementPlan& plan);

// Support of the rearranged indicator of E (subset of Z_T) in Z_pT.
std::vector<i64> rearranged_set(const std::vector<i64>& e_set,
                                const RearrangementPlan& plan);

// Rearranged E plus guard windows [b - guard, b] before every block
// boundary. Sorted subset of Z_pT; measure <= P(E) + (guard + 2T)/(T sqrt p).
std::vector<i64> exceptional_E1(const std::vector<i64>& e_set,
                                const RearrangementPlan& plan, i64 guard);

struct OmegaSearch {
  bool found = false;
  RearrangementPlan plan;
  i64 candidates_tried = 0;
  // worst (x, b) margin of the final candidate: min over pairs of
  // sum - |Lambda_pT|/(2T), scaled by 2T to stay integral
  i64 worst_scaled_margin = 0;
  i64 worst_x = -1, worst_b = -1;
};

// Seeded search for shifts satisfying, for every x in Z_pT and b in Z_T,
// sum_{a in Lambda_pT} [rearranged 1_b](x+a) >= |Lambda_pT| / (2T),
// verified exhaustively before a plan is accepted.
OmegaSearch find_good_omega(i64 T, i64 p, const ResidueSet& lam_pT, std::uint64_t seed,
                            i64 budget);

}  // namespace subavg
