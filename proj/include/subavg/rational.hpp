#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace subavg {

// Exact rational arithmetic for all densities, means and distribution
// atoms. Backed by GMP so downstream equality checks never see rounding.
using Rat = mpq_class;
using Int = mpz_class;

inline Rat rat(long num, long den = 1) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  Rat r(num, den);
  r.canonicalize();
  return r;
}

inline Rat rat_of(std::int64_t num, std::int64_t den = 1) {
  Rat r(Int(static_cast<long>(num)), Int(static_cast<long>(den)));
  r.canonicalize();
  return r;
}

// Smallest integer >= r.
inline Int rat_ceil(const Rat& r) {
  Int q;
  mpz_cdiv_q(q.get_mpz_t(), r.get_num().get_mpz_t(), r.get_den().get_mpz_t());
  return q;
}

// Largest integer <= r.
inline Int rat_floor(const Rat& r) {
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), r.get_num().get_mpz_t(), r.get_den().get_mpz_t());
  return q;
}

inline std::int64_t to_i64(const Int& v) {
  if (!v.fits_slong_p()) throw std::overflow_error("integer exceeds 64 bits");
  return static_cast<std::int64_t>(v.get_si());
}

// Parses "a", "a/b" or a decimal like "0.25" into an exact rational.
Rat parse_rat(const std::string& text);

inline std::string rat_str(const Rat& r) { return r.get_str(); }

inline bool is_dyadic(const Rat& r) {
  Int den = r.get_den();
  while (mpz_even_p(den.get_mpz_t())) den /= 2;
  return den == 1;
}

}  // namespace subavg
