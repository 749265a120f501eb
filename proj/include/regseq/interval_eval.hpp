#ifndef REGSEQ_INTERVAL_EVAL_HPP
#define REGSEQ_INTERVAL_EVAL_HPP

#include <gmp.h>
#include <mpfr.h>

#include <algorithm>
#include <cstddef>
#include <vector>

#include "regseq/dyadic.hpp"
#include "regseq/errors.hpp"
#include "regseq/funcspec.hpp"
#include "regseq/numeric.hpp"

namespace regseq::funclib::detail {

class MpfrVal {
 public:
  explicit MpfrVal(mpfr_prec_t prec) { mpfr_init2(v_, prec); }
  ~MpfrVal() { mpfr_clear(v_); }
  MpfrVal(const MpfrVal&) = delete;
  MpfrVal& operator=(const MpfrVal&) = delete;
  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }

 private:
  mpfr_t v_;
};

inline Dyadic dyadic_from_mpfr(mpfr_srcptr x) {
  if (mpfr_zero_p(x)) return Dyadic();
  if (!mpfr_number_p(x))
    throw InternalContradiction("non-finite value in certified evaluation");
  Int man;
  mpfr_exp_t e = mpfr_get_z_2exp(man.get_mpz_t(), x);
  return Dyadic(man, static_cast<long>(e));
}

inline long to_long_checked(const Int& v, const char* what) {
  if (!v.fits_slong_p()) throw BadArgument(std::string(what) + " out of supported range");
  return v.get_si();
}

// One directed bound of x^e for integer x >= 1 and non-integer rational e,
// computed as exp(e * ln x) with every step rounded toward `rnd`. ln x >= 0,
// so the ln bound direction flips with the sign of e.
inline void pow_bound(mpfr_ptr out, const Int& x, const Rat& e, mpfr_rnd_t rnd) {
  mpfr_rnd_t log_rnd = ((sign(e) >= 0) == (rnd == MPFR_RNDD)) ? MPFR_RNDD : MPFR_RNDU;
  mpfr_set_z(out, x.get_mpz_t(), log_rnd);
  mpfr_log(out, out, log_rnd);
  mpfr_mul_q(out, out, e.get_mpq_t(), rnd);
  mpfr_exp(out, out, rnd);
}

// Directed-rounding accumulator for a sum of power terms over an x-range.
class BoxAccum {
 public:
  explicit BoxAccum(mpfr_prec_t prec) : lo_(prec), hi_(prec), prec_(prec) {
    mpfr_set_zero(lo_.get(), 0);
    mpfr_set_zero(hi_.get(), 0);
  }

  // c * x^e over [xa, xb], e non-integer. x^e is monotone in x (direction by
  // sign of e); a negative c swaps which endpoint feeds which side.
  void add_power_term(const Rat& c, const Rat& e, const Int& xa, const Int& xb) {
    const Int& x_min = sign(e) > 0 ? xa : xb;
    const Int& x_max = sign(e) > 0 ? xb : xa;
    MpfrVal tmin(prec_), tmax(prec_);
    pow_bound(tmin.get(), x_min, e, MPFR_RNDD);
    pow_bound(tmax.get(), x_max, e, MPFR_RNDU);
    if (sign(c) >= 0) {
      mpfr_mul_q(tmin.get(), tmin.get(), c.get_mpq_t(), MPFR_RNDD);
      mpfr_mul_q(tmax.get(), tmax.get(), c.get_mpq_t(), MPFR_RNDU);
      mpfr_add(lo_.get(), lo_.get(), tmin.get(), MPFR_RNDD);
      mpfr_add(hi_.get(), hi_.get(), tmax.get(), MPFR_RNDU);
    } else {
      mpfr_mul_q(tmin.get(), tmin.get(), c.get_mpq_t(), MPFR_RNDU);
      mpfr_mul_q(tmax.get(), tmax.get(), c.get_mpq_t(), MPFR_RNDD);
      mpfr_add(lo_.get(), lo_.get(), tmax.get(), MPFR_RNDD);
      mpfr_add(hi_.get(), hi_.get(), tmin.get(), MPFR_RNDU);
    }
  }

  void add_rat_range(const Rat& qlo, const Rat& qhi) {
    mpfr_add_q(lo_.get(), lo_.get(), qlo.get_mpq_t(), MPFR_RNDD);
    mpfr_add_q(hi_.get(), hi_.get(), qhi.get_mpq_t(), MPFR_RNDU);
  }

  DyadicInterval to_interval() const {
    return DyadicInterval(dyadic_from_mpfr(lo_.get()), dyadic_from_mpfr(hi_.get()));
  }

 private:
  MpfrVal lo_, hi_;
  mpfr_prec_t prec_;
};

// Exact value of c * x^k for integer k (possibly negative) and x >= 1.
inline Rat rat_power_value(const Rat& c, const Rat& expo, const Int& x) {
  long k = to_long_checked(expo.get_num(), "integer exponent");
  if (k >= 0) return c * Rat(pow_int(x, static_cast<unsigned long>(k)));
  return c / Rat(pow_int(x, static_cast<unsigned long>(-k)));
}

inline mpfr_prec_t working_precision(const std::vector<PowerTerm>& terms, const Int& x,
                                     unsigned frac_bits) {
  std::size_t xbits = bit_length(x);
  std::size_t mag = 8;
  for (const auto& t : terms) {
    std::size_t e_up = 0;
    if (sign(t.expo) > 0)
      e_up = static_cast<std::size_t>(to_long_checked(ceil_rat(t.expo), "exponent"));
    mag = std::max(mag, bit_length(t.coeff.get_num()) + e_up * xbits + 8);
  }
  return static_cast<mpfr_prec_t>(frac_bits + mag + terms.size() + 64);
}

// Range enclosure of sum(c_i * x^(e_i)) over the real interval [xa, xb],
// term-wise monotone envelope. Point evaluation is the xa == xb case.
inline DyadicInterval eval_terms_range(const std::vector<PowerTerm>& terms, const Int& xa,
                                       const Int& xb, mpfr_prec_t prec) {
  BoxAccum acc(prec);
  Rat qlo(0), qhi(0);
  for (const auto& t : terms) {
    if (is_integer(t.expo)) {
      Rat va = rat_power_value(t.coeff, t.expo, xa);
      Rat vb = (xa == xb) ? va : rat_power_value(t.coeff, t.expo, xb);
      qlo += std::min(va, vb);
      qhi += std::max(va, vb);
    } else {
      acc.add_power_term(t.coeff, t.expo, xa, xb);
    }
  }
  acc.add_rat_range(qlo, qhi);
  return acc.to_interval();
}

}  // namespace regseq::funclib::detail

#endif  // REGSEQ_INTERVAL_EVAL_HPP
