#ifndef REGSEQ_FUNCLIB_HPP
#define REGSEQ_FUNCLIB_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "regseq/dyadic.hpp"
#include "regseq/errors.hpp"
#include "regseq/funcspec.hpp"
#include "regseq/interval_eval.hpp"
#include "regseq/numeric.hpp"

namespace regseq::funclib {

// A dyadic enclosure of f^(k)(x) together with the fractional precision it
// was refined to. The sole gateway to floors and fractional parts.
struct CertifiedValue {
  DyadicInterval enclosure;
  unsigned frac_bits = 0;
};

struct EvalOptions {
  unsigned start_bits = 64;      // first precision rung; doubled on failure
  unsigned cap_bits = 1u << 15;  // hard cap; exceeding it is a typed error
};

inline Rat pow2_inv(unsigned bits) { return Rat(Int(1), pow_int(Int(2), bits)); }

namespace detail {

// Exact sign of c * x^(p/q) - r for a single non-integer-exponent power term
// (q >= 2, x >= 1). Both sides are raised to the q-th power once signs agree,
// which reduces everything to integer comparisons.
inline int cmp_single_power(const Rat& c, const Rat& e, const Int& x, const Rat& r) {
  if (sign(c) == 0) return -sign(r);
  if (x == 1) {
    Rat d = c - r;
    return sign(d);
  }
  int sl = sign(c);
  int sr = sign(r);
  if (sr == 0) return sl;
  if (sl != sr) return sl > sr ? 1 : -1;
  unsigned long q = static_cast<unsigned long>(
      to_long_checked(e.get_den(), "exponent denominator"));
  long p = to_long_checked(e.get_num(), "exponent numerator");
  Rat cq = pow_rat(abs(c), q);
  Rat rq = pow_rat(abs(r), q);
  Int lhs = cq.get_num() * rq.get_den();
  Int rhs = rq.get_num() * cq.get_den();
  if (p >= 0)
    lhs *= pow_int(x, static_cast<unsigned long>(p));
  else
    rhs *= pow_int(x, static_cast<unsigned long>(-p));
  int t = cmp(lhs, rhs);
  return sl > 0 ? t : -t;
}

// Evaluation state of one derivative of a spec at one integer point.
// Terms with integer exponents collapse into an exact rational part; at most
// one remaining non-integer power term keeps exact comparisons available.
class PointEval {
 public:
  PointEval(const std::vector<PowerTerm>& terms, Int x) : x_(std::move(x)), rat_part_(0) {
    if (x_ < 1) throw BadArgument("evaluation point must be >= 1");
    for (const auto& t : terms) {
      if (is_integer(t.expo))
        rat_part_ += rat_power_value(t.coeff, t.expo, x_);
      else
        irr_.push_back(t);
    }
  }

  static PointEval of(const FunctionSpec& spec, int order, const Int& x) {
    return PointEval(spec.derivative_terms(order), x);
  }

  bool exact() const { return irr_.empty(); }
  bool exactly_comparable() const { return irr_.size() <= 1; }
  const Rat& rational_part() const { return rat_part_; }
  const Int& point() const { return x_; }

  Rat exact_value() const {
    if (!exact()) throw InternalContradiction("exact_value on inexact evaluation");
    return rat_part_;
  }

  // Requires exactly_comparable(); decides sign(value - r) with no rounding.
  int cmp_exact(const Rat& r) const {
    if (exact()) {
      Rat d = rat_part_ - r;
      return sign(d);
    }
    return cmp_single_power(irr_[0].coeff, irr_[0].expo, x_, r - rat_part_);
  }

  CertifiedValue enclosure(unsigned frac_bits, const EvalOptions& opts) const {
    if (frac_bits < 1) throw BadArgument("frac_bits must be >= 1");
    if (frac_bits > opts.cap_bits)
      throw PrecisionCapExceeded("requested " + std::to_string(frac_bits) +
                                 " fractional bits with cap " + std::to_string(opts.cap_bits));
    Rat target = pow2_inv(frac_bits);
    if (exact()) {
      return CertifiedValue{DyadicInterval(Dyadic::from_rat_floor(rat_part_, frac_bits),
                                           Dyadic::from_rat_ceil(rat_part_, frac_bits)),
                            frac_bits};
    }
    std::vector<PowerTerm> all = irr_;
    if (sign(rat_part_) != 0) all.push_back({rat_part_, Rat(0)});
    mpfr_prec_t wp = working_precision(all, x_, frac_bits);
    mpfr_prec_t wp_max = working_precision(all, x_, opts.cap_bits) + 4096;
    DyadicInterval cur = eval_terms_range(all, x_, x_, wp);
    while (cur.width() > target) {
      wp *= 2;
      if (wp > wp_max)
        throw PrecisionCapExceeded("enclosure width did not reach 2^-" +
                                   std::to_string(frac_bits) + " within the precision cap");
      // intersecting keeps refinement monotone: enclosures only shrink
      cur = intersect(cur, eval_terms_range(all, x_, x_, wp));
    }
    return CertifiedValue{cur, frac_bits};
  }

  // Certified sign(value - r): -1, 0, +1. Escalates precision, falls back to
  // the exact route when available, and loudly refuses at the cap.
  int cmp(const Rat& r, const EvalOptions& opts) const {
    if (exactly_comparable()) return cmp_exact(r);
    for (unsigned fb = opts.start_bits; fb <= opts.cap_bits; fb = escalate(fb, opts)) {
      CertifiedValue cv = enclosure(fb, opts);
      if (regseq::cmp(cv.enclosure.lo, r) > 0) return 1;
      if (regseq::cmp(cv.enclosure.hi, r) < 0) return -1;
    }
    throw PrecisionCapExceeded("value within 2^-" + std::to_string(opts.cap_bits) +
                               " of a comparison boundary and not exactly decidable");
  }

  static unsigned escalate(unsigned fb, const EvalOptions& opts) {
    if (fb == opts.cap_bits) return opts.cap_bits + 1;  // terminate loop
    return std::min(fb * 2, opts.cap_bits);
  }

 private:
  Int x_;
  Rat rat_part_;
  std::vector<PowerTerm> irr_;
};

}  // namespace detail

// Certified enclosure of f^(order)(x), width <= 2^-frac_bits.
inline CertifiedValue eval(const FunctionSpec& spec, int order, const Int& x,
                           unsigned frac_bits, const EvalOptions& opts = {}) {
  if (order < 0 || order > 2) throw BadArgument("derivative order must be 0, 1 or 2");
  return detail::PointEval::of(spec, order, x).enclosure(frac_bits, opts);
}

struct FlooredValue {
  CertifiedValue value;
  Int floor;
  // set when integrality of the value is exactly decidable; irrational-route
  // sums near an integer stay unknown
  std::optional<bool> is_integer;
};

namespace detail {

inline FlooredValue floored_from_point(const PointEval& pe, const EvalOptions& opts) {
  if (pe.exact()) {
    Rat v = pe.exact_value();
    Int k = floor_rat(v);
    unsigned fb = opts.start_bits;
    return FlooredValue{
        CertifiedValue{DyadicInterval(Dyadic::from_rat_floor(v, fb), Dyadic::from_rat_ceil(v, fb)),
                       fb},
        k, regseq::is_integer(v)};
  }
  for (unsigned fb = opts.start_bits; fb <= opts.cap_bits; fb = PointEval::escalate(fb, opts)) {
    CertifiedValue cv = pe.enclosure(fb, opts);
    Int klo = cv.enclosure.lo.floor();
    Int khi = cv.enclosure.hi.floor();
    if (klo == khi) {
      // enclosure inside [k, k+1); integral only if it is the point k
      std::optional<bool> integral;
      if (cmp(cv.enclosure.lo, Rat(klo)) > 0)
        integral = false;
      else if (pe.exactly_comparable())
        integral = (pe.cmp_exact(Rat(klo)) == 0);
      return FlooredValue{cv, klo, integral};
    }
    if (khi == klo + 1 && pe.exactly_comparable()) {
      // boundary straddle: one exact comparison settles which side
      int c = pe.cmp_exact(Rat(khi));
      return FlooredValue{cv, c >= 0 ? khi : klo, c == 0};
    }
  }
  throw PrecisionCapExceeded("floor undecidable at the precision cap (value too close to an integer)");
}

}  // namespace detail

// Exact floor of f^(order)(x), proved by an enclosure or an exact comparison.
inline FlooredValue floored_eval(const FunctionSpec& spec, int order, const Int& x,
                                 const EvalOptions& opts = {}) {
  if (order < 0 || order > 2) throw BadArgument("derivative order must be 0, 1 or 2");
  return detail::floored_from_point(detail::PointEval::of(spec, order, x), opts);
}

inline Int floor_exact(const FunctionSpec& spec, int order, const Int& x,
                       const EvalOptions& opts = {}) {
  return floored_eval(spec, order, x, opts).floor;
}

namespace detail {

// Hardware estimate of the value, good enough to seed the certified
// adjustment below whenever the magnitude stays far from 2^53.
inline double estimate_value(const PointEval& pe, const std::vector<PowerTerm>& irr) {
  double est = pe.rational_part().get_d();
  for (const auto& t : irr)
    est += t.coeff.get_d() * std::pow(pe.point().get_d(), t.expo.get_d());
  return est;
}

}  // namespace detail

// Exact floor through one double-precision estimate certified by exact
// power comparisons; no interval machinery. Only available for specs with
// at most one non-integer-exponent term and moderate magnitudes -- the
// scanner's bulk path. Returns nullopt when not applicable.
inline std::optional<Int> floor_exact_cheap(const FunctionSpec& spec, int order, const Int& x) {
  if (order < 0 || order > 2) throw BadArgument("derivative order must be 0, 1 or 2");
  auto terms = spec.derivative_terms(order);
  detail::PointEval pe(terms, x);
  if (pe.exact()) return floor_rat(pe.exact_value());
  if (!pe.exactly_comparable()) return std::nullopt;
  std::vector<PowerTerm> irr;
  for (const auto& t : terms)
    if (!is_integer(t.expo)) irr.push_back(t);
  double est = detail::estimate_value(pe, irr);
  if (!std::isfinite(est) || std::abs(est) > 9.0e15) return std::nullopt;  // past 2^53
  Int k;
  mpz_set_d(k.get_mpz_t(), std::floor(est));
  for (int guard = 0;; ++guard) {
    if (guard > 64) return std::nullopt;  // estimate too far off; take the enclosure route
    if (pe.cmp_exact(Rat(k)) < 0) {
      k -= 1;
      continue;
    }
    if (pe.cmp_exact(Rat(k + 1)) >= 0) {
      k += 1;
      continue;
    }
    return k;  // certified: k <= value < k+1
  }
}

// Fractional-part window [lo, hi] with per-endpoint open/closed flags,
// 0 <= lo < hi <= 1.
struct FracWindow {
  Rat lo;
  Rat hi;
  bool lo_closed = true;
  bool hi_closed = false;

  static FracWindow closed_open(Rat a, Rat b) { return {std::move(a), std::move(b), true, false}; }
  static FracWindow open(Rat a, Rat b) { return {std::move(a), std::move(b), false, false}; }
  static FracWindow closed(Rat a, Rat b) { return {std::move(a), std::move(b), true, true}; }

  void validate() const {
    if (sign(lo) < 0 || !(lo < hi) || hi > 1) throw BadArgument("window must satisfy 0 <= lo < hi <= 1");
  }
};

enum class Membership { inside, outside };

struct FracDecision {
  Membership membership;
  Int floor;
  // certified lower bound on the distance from {f^(order)(x)} to the window
  // boundary (inside) or to the window itself (outside); 0 when the decision
  // came from an exact boundary hit
  Rat margin;
  unsigned frac_bits_used = 0;
};

namespace detail {

inline Rat clamp_nonneg(Rat v) { return sign(v) < 0 ? Rat(0) : v; }

inline FracDecision frac_decision(const PointEval& pe, const FracWindow& w,
                                  const EvalOptions& opts) {
  w.validate();
  FlooredValue fv = floored_from_point(pe, opts);
  const Int& k = fv.floor;
  Rat a_abs = Rat(k) + w.lo;
  Rat b_abs = Rat(k) + w.hi;

  if (pe.exactly_comparable()) {
    int ca = pe.cmp_exact(a_abs);
    int cb = pe.cmp_exact(b_abs);
    bool in = (ca > 0 || (ca == 0 && w.lo_closed)) && (cb < 0 || (cb == 0 && w.hi_closed));
    Rat margin(0);
    if (pe.exact()) {
      Rat frac = pe.exact_value() - Rat(k);
      Rat d_lo = frac - w.lo, d_hi = w.hi - frac;
      margin = in ? std::min(d_lo, d_hi) : (ca < 0 ? Rat(w.lo - frac) : Rat(frac - w.hi));
      margin = clamp_nonneg(margin);  // exact boundary hits give margin 0
    } else if (ca != 0 && cb != 0) {
      // distance bound from the enclosure actually achieved (may be 0 when
      // the exact comparison decided a straddling enclosure)
      const DyadicInterval& e = fv.value.enclosure;
      Rat d_lo = e.lo.to_rat() - a_abs, d_hi = b_abs - e.hi.to_rat();
      margin = in ? clamp_nonneg(std::min(d_lo, d_hi))
                  : clamp_nonneg(ca < 0 ? Rat(a_abs - e.hi.to_rat()) : Rat(e.lo.to_rat() - b_abs));
    }
    return {in ? Membership::inside : Membership::outside, k, margin, fv.value.frac_bits};
  }

  for (unsigned fb = std::max(opts.start_bits, fv.value.frac_bits);;
       fb = PointEval::escalate(fb, opts)) {
    CertifiedValue cv = pe.enclosure(fb, opts);
    const Dyadic& lo = cv.enclosure.lo;
    const Dyadic& hi = cv.enclosure.hi;
    bool above_a = w.lo_closed ? cmp(lo, a_abs) >= 0 : cmp(lo, a_abs) > 0;
    bool below_b = w.hi_closed ? cmp(hi, b_abs) <= 0 : cmp(hi, b_abs) < 0;
    if (above_a && below_b) {
      Rat d_lo = lo.to_rat() - a_abs, d_hi = b_abs - hi.to_rat();
      Rat margin = clamp_nonneg(std::min(d_lo, d_hi));
      return {Membership::inside, k, margin, fb};
    }
    bool left_out = w.lo_closed ? cmp(hi, a_abs) < 0 : cmp(hi, a_abs) <= 0;
    bool right_out = w.hi_closed ? cmp(lo, b_abs) > 0 : cmp(lo, b_abs) >= 0;
    if (left_out || right_out) {
      Rat margin = clamp_nonneg(left_out ? Rat(a_abs - hi.to_rat()) : Rat(lo.to_rat() - b_abs));
      return {Membership::outside, k, margin, fb};
    }
    if (fb >= opts.cap_bits)
      throw PrecisionCapExceeded("fractional part straddles a window endpoint at the precision cap");
  }
}

}  // namespace detail

// Decides {f^(order)(x)} in `window` by an enclosure contained in or disjoint
// from it (exact comparisons settle boundary straddles when available).
inline FracDecision frac_in_window(const FunctionSpec& spec, int order, const Int& x,
                                   const FracWindow& window, const EvalOptions& opts = {}) {
  if (order < 0 || order > 2) throw BadArgument("derivative order must be 0, 1 or 2");
  return detail::frac_decision(detail::PointEval::of(spec, order, x), window, opts);
}

// Certified sign(f^(order)(x) - r).
inline int certified_cmp(const FunctionSpec& spec, int order, const Int& x, const Rat& r,
                         const EvalOptions& opts = {}) {
  return detail::PointEval::of(spec, order, x).cmp(r, opts);
}

namespace detail {

// Smallest integer X >= 1 with X^e >= r (e = p/q > 0 rational), by exact
// comparisons: X^p >= r^q after clearing denominators.
inline Int min_x_power_at_least(const Rat& e, const Rat& r) {
  if (sign(r) <= 0 || r <= 1) return Int(1);
  unsigned long q = static_cast<unsigned long>(to_long_checked(e.get_den(), "exponent"));
  unsigned long p = static_cast<unsigned long>(to_long_checked(e.get_num(), "exponent"));
  Rat rq = pow_rat(r, q);
  auto ok = [&](const Int& x) { return Rat(pow_int(x, p)) >= rq; };
  Int hi(1);
  while (!ok(hi)) hi *= 2;
  Int lo = hi / 2;
  while (hi - lo > 1) {
    Int mid = (lo + hi) / 2;
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

// Certified cutoff X with f''(x) > 0 for all real x >= X: past X the leading
// second-derivative term dominates the sum of the magnitudes of the others.
inline Int increasing_derivative_cutoff(const FunctionSpec& spec) {
  auto terms = spec.derivative_terms(2);
  if (terms.empty())
    throw NotMonotone("second derivative vanishes identically; f' is not strictly increasing");
  const PowerTerm& lead = terms.front();
  if (sign(lead.coeff) <= 0)
    throw NotMonotone("leading second-derivative term is not positive");
  Int cutoff(1);
  std::size_t others = terms.size() - 1;
  for (std::size_t i = 1; i < terms.size(); ++i) {
    Rat ratio = Rat(2 * static_cast<long>(others)) * abs(terms[i].coeff) / lead.coeff;
    Rat gap = lead.expo - terms[i].expo;  // > 0: exponents strictly decrease
    Int xi = min_x_power_at_least(gap, ratio);
    if (xi > cutoff) cutoff = xi;
  }
  return cutoff;
}

}  // namespace detail

// Minimal integer m >= lo_hint with f'(m) >= y, by certified bisection on
// integers within the certifiably increasing range of f'. The returned m
// carries the proved bracket f'(m-1) < y <= f'(m).
inline Int invert_derivative(const FunctionSpec& spec, const Rat& y, const Int& lo_hint,
                             const EvalOptions& opts = {}) {
  Int cutoff = detail::increasing_derivative_cutoff(spec);
  Int start = lo_hint > cutoff ? lo_hint : cutoff;
  if (start < 1) start = 1;
  auto reaches = [&](const Int& t) { return certified_cmp(spec, 1, t, y, opts) >= 0; };
  if (reaches(start)) {
    if (start > 1 && reaches(start - 1))
      throw BadArgument("derivative crossing lies below the certified search start");
    return start;
  }
  Int lo = start, hi = start;
  for (int it = 0;; ++it) {
    if (it > 512) throw NotMonotone("derivative does not reach the target within the search budget");
    hi *= 2;
    if (reaches(hi)) break;
    lo = hi;
  }
  while (hi - lo > 1) {
    Int mid = (lo + hi) / 2;
    (reaches(mid) ? hi : lo) = mid;
  }
  if (!reaches(hi) || reaches(hi - 1))
    throw InternalContradiction("inversion bracket failed recheck");
  return hi;
}

// Integer x0 with |f''(x)| <= bound certified for all real x >= x0. The
// certificate uses the term-magnitude envelope of f'', which decreases
// monotonically to 0 for the supported family; x0 is minimal for it.
inline Int second_derivative_threshold(const FunctionSpec& spec, const Rat& bound,
                                       const EvalOptions& opts = {}) {
  if (sign(bound) <= 0) throw BadArgument("second-derivative bound must be positive");
  auto terms = spec.derivative_terms(2);
  if (terms.empty()) return Int(1);
  std::vector<PowerTerm> envelope;
  for (const auto& t : terms) {
    if (sign(t.expo) >= 0)
      throw NotMonotone("second derivative does not decay to zero for this spec");
    envelope.push_back({abs(t.coeff), t.expo});
  }
  auto small_enough = [&](const Int& x) {
    return detail::PointEval(envelope, x).cmp(bound, opts) <= 0;
  };
  if (small_enough(1)) return Int(1);
  Int lo(1), hi(1);
  for (int it = 0;; ++it) {
    if (it > 512) throw NotMonotone("second-derivative envelope does not reach the bound");
    hi *= 2;
    if (small_enough(hi)) break;
    lo = hi;
  }
  while (hi - lo > 1) {
    Int mid = (lo + hi) / 2;
    (small_enough(mid) ? hi : lo) = mid;
  }
  if (!small_enough(hi) || small_enough(hi - 1))
    throw InternalContradiction("threshold bracket failed recheck");
  return hi;
}

struct AbsBoundResult {
  bool pass;
  Rat margin;
};

// Certified decision of sup |f''| <= bound over the real interval [xa, xb].
// A pass comes from a range enclosure; a fail needs a witness point.
inline AbsBoundResult second_abs_within(const FunctionSpec& spec, const Int& xa, const Int& xb,
                                        const Rat& bound, const EvalOptions& opts = {}) {
  if (xa < 1 || xb < xa) throw BadArgument("invalid interval for second-derivative bound");
  auto terms = spec.derivative_terms(2);
  if (terms.empty()) return {true, bound};
  mpfr_prec_t wp = detail::working_precision(terms, xb, opts.start_bits);
  for (unsigned fb = opts.start_bits;; fb = detail::PointEval::escalate(fb, opts), wp *= 2) {
    DyadicInterval range = detail::eval_terms_range(terms, xa, xb, wp);
    Rat alo = abs(range.lo.to_rat()), ahi = abs(range.hi.to_rat());
    Rat ub_abs = std::max(alo, ahi);
    if (ub_abs <= bound) return {true, Rat(bound - ub_abs)};
    for (const Int& pt : {xa, xb}) {
      DyadicInterval pe = detail::eval_terms_range(terms, pt, pt, wp);
    // |v| >= max(0, lo, -hi): positive only when the enclosure excludes 0
      Rat plo = pe.lo.to_rat(), nhi = -pe.hi.to_rat();
      Rat lb_abs = std::max(Rat(0), std::max(plo, nhi));
      if (lb_abs > bound) return {false, Rat(lb_abs - bound)};
    }
    if (fb >= opts.cap_bits)
      throw PrecisionCapExceeded("second-derivative bound undecidable at the precision cap");
  }
}

}  // namespace regseq::funclib

#endif  // REGSEQ_FUNCLIB_HPP
