#ifndef REGSEQ_NUMERIC_HPP
#define REGSEQ_NUMERIC_HPP

#include <gmp.h>
#include <gmpxx.h>

#include <cstddef>
#include <string>

#include "regseq/errors.hpp"

namespace regseq {

// Arbitrary-precision integers and rationals. mpq_class keeps rationals
// canonical (positive denominator, reduced), which is exactly the Rational
// invariant we need.
using Int = mpz_class;
using Rat = mpq_class;

inline int sign(const Int& x) { return mpz_sgn(x.get_mpz_t()); }
inline int sign(const Rat& x) { return mpq_sgn(x.get_mpq_t()); }

inline Int pow_int(const Int& base, unsigned long e) {
  Int r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
  return r;
}

inline Rat pow_rat(const Rat& base, unsigned long e) {
  Rat r;
  mpz_pow_ui(r.get_num_mpz_t(), base.get_num().get_mpz_t(), e);
  mpz_pow_ui(r.get_den_mpz_t(), base.get_den().get_mpz_t(), e);
  return r;  // already canonical: gcd(num,den)=1 is preserved by powering
}

inline Int floor_rat(const Rat& x) {
  Int r;
  mpz_fdiv_q(r.get_mpz_t(), x.get_num().get_mpz_t(), x.get_den().get_mpz_t());
  return r;
}

inline Int ceil_rat(const Rat& x) {
  Int r;
  mpz_cdiv_q(r.get_mpz_t(), x.get_num().get_mpz_t(), x.get_den().get_mpz_t());
  return r;
}

inline bool is_integer(const Rat& x) { return x.get_den() == 1; }

inline Int gcd(const Int& a, const Int& b) {
  Int r;
  mpz_gcd(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

// Floor of the q-th root of a nonnegative integer; exact integer arithmetic.
inline Int iroot(const Int& x, unsigned long q) {
  Int r;
  mpz_root(r.get_mpz_t(), x.get_mpz_t(), q);
  return r;
}

// Nonnegative remainder a mod m for m > 0.
inline Int mod_nonneg(const Int& a, const Int& m) {
  Int r;
  mpz_mod(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  return r;
}

inline std::size_t bit_length(const Int& x) {
  return x == 0 ? 1 : mpz_sizeinbase(x.get_mpz_t(), 2);
}

inline std::string to_string(const Int& x) { return x.get_str(); }

// Canonical "num/den" form, always with the explicit denominator so that
// serialized output stays schema-regular.
inline std::string to_string(const Rat& x) {
  return x.get_num().get_str() + "/" + x.get_den().get_str();
}

inline Int parse_int(const std::string& s) {
  if (s.empty()) throw ParseError("empty integer literal");
  Int r;
  if (mpz_set_str(r.get_mpz_t(), s.c_str(), 10) != 0)
    throw ParseError("invalid integer literal: '" + s + "'");
  return r;
}

// Parses "a" or "a/b" with b > 0.
inline Rat parse_rat(const std::string& s) {
  auto slash = s.find('/');
  if (slash == std::string::npos) return Rat(parse_int(s));
  Int num = parse_int(s.substr(0, slash));
  Int den = parse_int(s.substr(slash + 1));
  if (den <= 0) throw ParseError("rational with nonpositive denominator: '" + s + "'");
  Rat r(num, den);
  r.canonicalize();
  return r;
}

}  // namespace regseq

#endif  // REGSEQ_NUMERIC_HPP
