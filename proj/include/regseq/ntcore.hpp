#ifndef REGSEQ_NTCORE_HPP
#define REGSEQ_NTCORE_HPP

#include <algorithm>
#include <cstddef>
#include <optional>
#include <vector>

#include "regseq/errors.hpp"
#include "regseq/funclib.hpp"
#include "regseq/numeric.hpp"

namespace regseq::ntcore {

struct Primorial {
  unsigned H;
  Int value;  // product of all primes <= H
};

inline std::vector<unsigned> primes_up_to(unsigned n) {
  std::vector<bool> composite(static_cast<std::size_t>(n) + 1, false);
  std::vector<unsigned> primes;
  for (unsigned p = 2; p <= n; ++p) {
    if (composite[p]) continue;
    primes.push_back(p);
    for (std::size_t q = static_cast<std::size_t>(p) * p; q <= n; q += p) composite[q] = true;
  }
  return primes;
}

inline Primorial primorial(unsigned H) {
  if (H < 2) throw BadArgument("primorial requires H >= 2");
  Int v(1);
  for (unsigned p : primes_up_to(H)) v *= p;
  return {H, v};
}

enum class Primality { composite, prime, probable_prime };

namespace detail {

inline bool miller_rabin_witness(const Int& n, const Int& d, unsigned long s, const Int& a) {
  Int x;
  mpz_powm(x.get_mpz_t(), a.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
  Int nm1 = n - 1;
  if (x == 1 || x == nm1) return false;
  for (unsigned long i = 1; i < s; ++i) {
    x = (x * x) % n;
    if (x == nm1) return false;
  }
  return true;  // a witnesses compositeness
}

}  // namespace detail

// Deterministic strong-pseudoprime test below 2^64 (the twelve-prime witness
// set covers that range); a fixed-base probable-prime test above it.
inline Primality is_prime(const Int& n) {
  if (n < 2) throw BadArgument("primality is defined for n >= 2");
  static const unsigned small_primes[] = {2,  3,  5,  7,  11, 13, 17, 19,
                                          23, 29, 31, 37, 41, 43, 47, 53};
  for (unsigned p : small_primes) {
    if (n == p) return Primality::prime;
    if (n % p == 0) return Primality::composite;
  }
  Int d = n - 1;
  unsigned long s = mpz_scan1(d.get_mpz_t(), 0);
  mpz_fdiv_q_2exp(d.get_mpz_t(), d.get_mpz_t(), s);
  bool deterministic = mpz_sizeinbase(n.get_mpz_t(), 2) <= 64;
  if (deterministic) {
    for (unsigned a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37})
      if (detail::miller_rabin_witness(n, d, s, Int(a))) return Primality::composite;
    return Primality::prime;
  }
  for (unsigned a : primes_up_to(230))  // 50 fixed bases
    if (detail::miller_rabin_witness(n, d, s, Int(a))) return Primality::composite;
  return Primality::probable_prime;
}

// Smallest (probable) prime >= n.
inline Int next_prime_at_least(Int n) {
  if (n <= 2) return Int(2);
  if (n % 2 == 0) n += 1;
  while (is_prime(n) == Primality::composite) n += 2;
  return n;
}

struct FailingPair {
  std::size_t i;
  std::size_t j;
  Int g;  // > 1, divides both cited values
};

struct PairwiseResult {
  bool all_coprime;
  std::optional<FailingPair> failing_pair;  // lexicographically first
};

// gcd of every pair; on failure reports the lexicographically first pair as
// an exact witness.
inline PairwiseResult pairwise_coprime(const std::vector<Int>& values) {
  if (values.empty()) throw BadArgument("pairwise_coprime requires a nonempty list");
  for (const Int& v : values)
    if (v < 1) throw BadArgument("pairwise_coprime requires values >= 1");
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    for (std::size_t j = i + 1; j < values.size(); ++j) {
      Int g = gcd(values[i], values[j]);
      if (g > 1) return {false, FailingPair{i, j, g}};
    }
  }
  return {true, std::nullopt};
}

enum class Parity { even, odd };

// Parity of an exactly resolved floor, decided through the criterion
// "floor(x) even iff {x/2} in [0, 1/2)" and cross-checked against the direct
// parity of the floor. The two routes must agree.
inline Parity floor_is_even(const funclib::FlooredValue& x) {
  const Int& k = x.floor;
  bool parity_even = mpz_even_p(k.get_mpz_t()) != 0;

  // Criterion route: clamp the enclosure to the proved containment
  // x in [k, k+1), halve, and test {x/2} against 1/2 by dyadic comparison.
  Dyadic lo = x.value.enclosure.lo;
  Dyadic hi = x.value.enclosure.hi;
  Dyadic dk(k, 0), dk1(k + 1, 0);
  if (cmp(lo, dk) < 0) lo = dk;
  bool hi_open = false;  // after clamping, the upper end k+1 is excluded
  if (cmp(hi, dk1) >= 0) {
    hi = dk1;
    hi_open = true;
  }
  Int half_floor;  // floor(x/2) = floor(k/2)
  mpz_fdiv_q_2exp(half_floor.get_mpz_t(), k.get_mpz_t(), 1);
  Dyadic shift(half_floor, 0);
  Dyadic frac_lo = lo.halved() - shift;
  Dyadic frac_hi = hi.halved() - shift;
  Rat one_half(1, 2);
  bool criterion_even;
  if (cmp(frac_hi, one_half) < 0 || (hi_open && cmp(frac_hi, one_half) == 0))
    criterion_even = true;  // {x/2} certainly in [0, 1/2)
  else if (cmp(frac_lo, one_half) >= 0)
    criterion_even = false;  // {x/2} certainly in [1/2, 1)
  else
    throw InternalContradiction("halved enclosure straddles 1/2 despite a resolved floor");

  if (criterion_even != parity_even)
    throw InternalContradiction("parity criterion disagrees with direct floor parity");
  return parity_even ? Parity::even : Parity::odd;
}

struct CoprimeSubset {
  std::size_t size;
  std::vector<Int> witness;  // achieving subset, ascending
};

namespace detail {

class SubsetSearch {
 public:
  SubsetSearch(const Int& a, unsigned L) : n_(L), conflicts_(L) {
    values_.reserve(L);
    for (unsigned i = 0; i < L; ++i) values_.push_back(a + i);
    for (unsigned i = 0; i < L; ++i)
      for (unsigned j = i + 1; j < L; ++j)
        if (gcd(values_[i], values_[j]) > 1) {
          conflicts_[i].push_back(j);
          conflicts_[j].push_back(i);
        }
  }

  CoprimeSubset run() {
    std::vector<unsigned> all(n_);
    for (unsigned i = 0; i < n_; ++i) all[i] = i;
    std::vector<unsigned> chosen;
    explore(all, chosen);
    std::vector<Int> witness;
    witness.reserve(best_set_.size());
    for (unsigned i : best_set_) witness.push_back(values_[i]);
    std::sort(witness.begin(), witness.end());
    return {best_set_.size(), std::move(witness)};
  }

 private:
  // Branch on the element with the most remaining conflicts: include it
  // (dropping its neighbours) or exclude it. Prunes when even taking all
  // remaining elements cannot beat the incumbent.
  void explore(std::vector<unsigned> remaining, std::vector<unsigned>& chosen) {
    if (chosen.size() + remaining.size() <= best_set_.size()) return;
    if (remaining.empty()) {
      best_set_ = chosen;
      return;
    }
    unsigned pick = remaining[0];
    std::size_t max_deg = 0;
    for (unsigned v : remaining) {
      std::size_t deg = 0;
      for (unsigned w : conflicts_[v])
        if (std::find(remaining.begin(), remaining.end(), w) != remaining.end()) ++deg;
      if (deg > max_deg) {
        max_deg = deg;
        pick = v;
      }
    }
    if (max_deg == 0) {  // conflict-free remainder: take everything
      std::vector<unsigned> full = chosen;
      full.insert(full.end(), remaining.begin(), remaining.end());
      if (full.size() > best_set_.size()) best_set_ = std::move(full);
      return;
    }
    // include pick
    std::vector<unsigned> reduced;
    for (unsigned v : remaining)
      if (v != pick &&
          std::find(conflicts_[pick].begin(), conflicts_[pick].end(), v) == conflicts_[pick].end())
        reduced.push_back(v);
    chosen.push_back(pick);
    explore(std::move(reduced), chosen);
    chosen.pop_back();
    // exclude pick
    std::vector<unsigned> rest;
    for (unsigned v : remaining)
      if (v != pick) rest.push_back(v);
    explore(std::move(rest), chosen);
  }

  unsigned n_;
  std::vector<Int> values_;
  std::vector<std::vector<unsigned>> conflicts_;
  std::vector<unsigned> best_set_;
};

}  // namespace detail

// Exact maximum pairwise-coprime subset of {a, ..., a+L-1} with a witness,
// by branch and bound. The finite oracle behind the interval obstruction.
inline CoprimeSubset max_coprime_subset(const Int& a, unsigned L) {
  if (a < 1) throw BadArgument("interval start must be >= 1");
  if (L < 1) throw BadArgument("interval length must be >= 1");
  if (L > 32) throw IntervalTooLong("exact search budget covers L <= 32");
  return detail::SubsetSearch(a, L).run();
}

}  // namespace regseq::ntcore

#endif  // REGSEQ_NTCORE_HPP
