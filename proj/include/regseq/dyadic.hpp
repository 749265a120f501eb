#ifndef REGSEQ_DYADIC_HPP
#define REGSEQ_DYADIC_HPP

#include <string>
#include <utility>

#include "regseq/errors.hpp"
#include "regseq/numeric.hpp"

namespace regseq {

// Exact dyadic rational man * 2^exp2. Mantissa is kept odd (or zero with
// exp2 = 0) so equal values have equal representations.
class Dyadic {
 public:
  Dyadic() : man_(0), exp2_(0) {}
  Dyadic(Int man, long exp2) : man_(std::move(man)), exp2_(exp2) { normalize(); }
  explicit Dyadic(const Int& value) : man_(value), exp2_(0) { normalize(); }

  const Int& mantissa() const { return man_; }
  long exp2() const { return exp2_; }
  bool is_zero() const { return man_ == 0; }

  Rat to_rat() const {
    Rat r(man_);
    if (exp2_ >= 0) {
      mpz_mul_2exp(r.get_num_mpz_t(), r.get_num().get_mpz_t(),
                   static_cast<unsigned long>(exp2_));
    } else {
      mpz_mul_2exp(r.get_den_mpz_t(), r.get_den().get_mpz_t(),
                   static_cast<unsigned long>(-exp2_));
    }
    r.canonicalize();
    return r;
  }

  // Largest integer <= value; exact (floor division for negative mantissas).
  Int floor() const {
    Int r;
    if (exp2_ >= 0) {
      mpz_mul_2exp(r.get_mpz_t(), man_.get_mpz_t(), static_cast<unsigned long>(exp2_));
    } else {
      mpz_fdiv_q_2exp(r.get_mpz_t(), man_.get_mpz_t(), static_cast<unsigned long>(-exp2_));
    }
    return r;
  }

  friend Dyadic operator+(const Dyadic& a, const Dyadic& b) {
    long e = a.exp2_ < b.exp2_ ? a.exp2_ : b.exp2_;
    return Dyadic(a.shifted_man(e) + b.shifted_man(e), e);
  }
  friend Dyadic operator-(const Dyadic& a, const Dyadic& b) {
    long e = a.exp2_ < b.exp2_ ? a.exp2_ : b.exp2_;
    return Dyadic(a.shifted_man(e) - b.shifted_man(e), e);
  }
  Dyadic operator-() const { return Dyadic(-man_, exp2_); }

  // value / 2: exact, dyadics are closed under halving.
  Dyadic halved() const { return Dyadic(man_, exp2_ - 1); }

  friend int cmp(const Dyadic& a, const Dyadic& b) {
    long e = a.exp2_ < b.exp2_ ? a.exp2_ : b.exp2_;
    Int am = a.shifted_man(e), bm = b.shifted_man(e);
    return mpz_cmp(am.get_mpz_t(), bm.get_mpz_t());
  }

  // Compare man*2^exp2 against p/q by cross-multiplication; no rounding.
  friend int cmp(const Dyadic& a, const Rat& r) {
    Int lhs = a.man_ * r.get_den();
    Int rhs = r.get_num();
    if (a.exp2_ >= 0) {
      mpz_mul_2exp(lhs.get_mpz_t(), lhs.get_mpz_t(), static_cast<unsigned long>(a.exp2_));
    } else {
      mpz_mul_2exp(rhs.get_mpz_t(), rhs.get_mpz_t(), static_cast<unsigned long>(-a.exp2_));
    }
    return mpz_cmp(lhs.get_mpz_t(), rhs.get_mpz_t());
  }

  friend bool operator<(const Dyadic& a, const Dyadic& b) { return cmp(a, b) < 0; }
  friend bool operator<=(const Dyadic& a, const Dyadic& b) { return cmp(a, b) <= 0; }
  friend bool operator==(const Dyadic& a, const Dyadic& b) {
    return a.exp2_ == b.exp2_ && a.man_ == b.man_;
  }

  // Tightest dyadic bounds of p/q on the 2^-bits grid.
  static Dyadic from_rat_floor(const Rat& r, unsigned bits) {
    Int num = r.get_num();
    mpz_mul_2exp(num.get_mpz_t(), num.get_mpz_t(), bits);
    Int q;
    mpz_fdiv_q(q.get_mpz_t(), num.get_mpz_t(), r.get_den().get_mpz_t());
    return Dyadic(q, -static_cast<long>(bits));
  }
  static Dyadic from_rat_ceil(const Rat& r, unsigned bits) {
    Int num = r.get_num();
    mpz_mul_2exp(num.get_mpz_t(), num.get_mpz_t(), bits);
    Int q;
    mpz_cdiv_q(q.get_mpz_t(), num.get_mpz_t(), r.get_den().get_mpz_t());
    return Dyadic(q, -static_cast<long>(bits));
  }

 private:
  Int shifted_man(long target_exp) const {
    // requires target_exp <= exp2_
    Int r;
    mpz_mul_2exp(r.get_mpz_t(), man_.get_mpz_t(),
                 static_cast<unsigned long>(exp2_ - target_exp));
    return r;
  }

  void normalize() {
    if (man_ == 0) {
      exp2_ = 0;
      return;
    }
    unsigned long tz = mpz_scan1(man_.get_mpz_t(), 0);
    if (tz > 0) {
      mpz_fdiv_q_2exp(man_.get_mpz_t(), man_.get_mpz_t(), tz);
      exp2_ += static_cast<long>(tz);
    }
  }

  Int man_;
  long exp2_;
};

// namespace-scope declarations of the hidden friends, so qualified lookup
// (regseq::cmp) works from scopes that shadow the name
int cmp(const Dyadic& a, const Dyadic& b);
int cmp(const Dyadic& a, const Rat& r);

// Closed interval [lo, hi] with exactly representable endpoints.
struct DyadicInterval {
  Dyadic lo;
  Dyadic hi;

  DyadicInterval() = default;
  DyadicInterval(Dyadic l, Dyadic h) : lo(std::move(l)), hi(std::move(h)) {
    if (cmp(lo, hi) > 0) throw InternalContradiction("dyadic interval with lo > hi");
  }
  static DyadicInterval point(const Dyadic& v) { return DyadicInterval(v, v); }

  Rat width() const { return (hi - lo).to_rat(); }

  bool contains(const Rat& r) const { return cmp(lo, r) <= 0 && cmp(hi, r) >= 0; }

  DyadicInterval operator-(const Int& k) const {
    Dyadic dk(k, 0);
    return DyadicInterval(lo - dk, hi - dk);
  }
  DyadicInterval halved() const { return DyadicInterval(lo.halved(), hi.halved()); }

  friend DyadicInterval intersect(const DyadicInterval& a, const DyadicInterval& b) {
    const Dyadic& l = cmp(a.lo, b.lo) >= 0 ? a.lo : b.lo;
    const Dyadic& h = cmp(a.hi, b.hi) <= 0 ? a.hi : b.hi;
    if (cmp(l, h) > 0)
      throw InternalContradiction("enclosures of the same value do not intersect");
    return DyadicInterval(l, h);
  }
};

}  // namespace regseq

#endif  // REGSEQ_DYADIC_HPP
