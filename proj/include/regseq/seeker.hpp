#ifndef REGSEQ_SEEKER_HPP
#define REGSEQ_SEEKER_HPP

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "regseq/errors.hpp"
#include "regseq/funclib.hpp"
#include "regseq/ntcore.hpp"
#include "regseq/numeric.hpp"
#include "regseq/verifier.hpp"

namespace regseq::seeker {

struct StageEvent {
  std::string stage;
  std::vector<std::pair<std::string, std::string>> fields;
};
using TraceSink = std::function<void(const StageEvent&)>;

struct SeekOptions {
  unsigned retries = 25;  // prime / target escalations before giving up
  std::uint64_t fallback_budget = 1'000'000;
  funclib::EvalOptions eval;
  TraceSink trace;
};

// Full construction record for one witness n: every intermediate quantity is
// kept so the whole derivation can be re-verified from scratch.
struct ProofWitness {
  FunctionSpec spec;
  unsigned H;
  unsigned L_requested;
  Int q;
  ntcore::Primorial primorial;
  Int x0;
  Int m;
  Int n0;
  Int K;  // 15 * H * primorial
  Int b;
  Int k0;
  Int n;  // n0 + k0
  verifier::ConditionReport report;
  verifier::BlockCertificate certificate;
  bool q_probable;
  std::map<std::string, double> timings_ms;
};

namespace detail {

class StageTimer {
 public:
  explicit StageTimer(std::map<std::string, double>& sink) : sink_(sink) {}
  template <typename F>
  auto run(const std::string& stage, F&& f) {
    auto t0 = std::chrono::steady_clock::now();
    if constexpr (std::is_void_v<decltype(f())>) {
      f();
      sink_[stage] += elapsed_ms(t0);
    } else {
      auto r = f();
      sink_[stage] += elapsed_ms(t0);
      return r;
    }
  }

 private:
  static double elapsed_ms(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  }
  std::map<std::string, double>& sink_;
};

inline void emit(const SeekOptions& opts, std::string stage,
                 std::vector<std::pair<std::string, std::string>> fields) {
  if (opts.trace) opts.trace({std::move(stage), std::move(fields)});
}

// Certified f(x2) - f(x1) > r via enclosures (the gap in every use is large,
// so the first precision rung decides).
inline bool diff_exceeds(const FunctionSpec& spec, const Int& x2, const Int& x1, const Rat& r,
                         const funclib::EvalOptions& eval) {
  for (unsigned fb = eval.start_bits;; fb = funclib::detail::PointEval::escalate(fb, eval)) {
    auto e2 = funclib::eval(spec, 0, x2, fb, eval);
    auto e1 = funclib::eval(spec, 0, x1, fb, eval);
    if ((e2.enclosure.lo - e1.enclosure.hi).to_rat() > r) return true;
    if ((e2.enclosure.hi - e1.enclosure.lo).to_rat() < r) return false;
    if (fb >= eval.cap_bits)
      throw PrecisionCapExceeded("difference comparison undecidable at the precision cap");
  }
}

struct LocatedWindow {
  Int m;
  Int n0;
  Rat n0_margin;
};

// Stages (x0 known): locate the crossing m of the target y = T (an integer
// in Rat form), then the first n0 past it whose fractional part falls in
// ((1/6H), (1/5H)). Throws WindowMissed when a certified check fails, which
// escalates the target.
inline LocatedWindow locate_window(const FunctionSpec& g, const Rat& target, unsigned H,
                                   const Int& x0, const SeekOptions& opts,
                                   StageTimer& timer) {
  const auto& eval = opts.eval;
  Int target_floor = floor_rat(target);  // target is integral by construction

  Int m = timer.run("invert_m", [&] { return funclib::invert_derivative(g, target, x0 + 1, eval); });
  if (m <= x0) throw WindowMissed("crossing m did not exceed x0");
  if (funclib::floor_exact(g, 1, m, eval) != target_floor)
    throw WindowMissed("floor(f'(m)) differs from the target");
  auto frac_m = funclib::frac_in_window(
      g, 1, m, funclib::FracWindow::closed_open(Rat(0), Rat(Int(1), Int(100) * H)), eval);
  if (frac_m.membership != funclib::Membership::inside)
    throw WindowMissed("{f'(m)} not below 1/(100H)");
  emit(opts, "crossing", {{"m", to_string(m)}, {"frac_margin", to_string(frac_m.margin)}});

  Rat lo_edge(Int(1), Int(6) * H);
  Rat hi_edge(Int(1), Int(5) * H);
  Int n0 = timer.run("invert_n0",
                     [&] { return funclib::invert_derivative(g, target + lo_edge, m, eval); });
  if (funclib::floor_exact(g, 1, n0, eval) != target_floor)
    throw WindowMissed("floor(f'(n0)) differs from the target");
  auto frac_n0 = funclib::frac_in_window(g, 1, n0, funclib::FracWindow::open(lo_edge, hi_edge), eval);
  if (frac_n0.membership != funclib::Membership::inside)
    throw WindowMissed("{f'(n0)} missed the (1/(6H), 1/(5H)) window");
  emit(opts, "window",
       {{"n0", to_string(n0)}, {"margin", to_string(frac_n0.margin)}});
  return {std::move(m), std::move(n0), frac_n0.margin};
}

inline ProofWitness witness_attempt(const FunctionSpec& spec, unsigned H, unsigned L_requested,
                                    const Int& q, const ntcore::Primorial& pi, const Int& x0,
                                    const SeekOptions& opts, std::map<std::string, double>& timings) {
  const auto& eval = opts.eval;
  StageTimer timer(timings);
  Int q_pi = q * pi.value;
  auto loc = locate_window(spec, Rat(q_pi), H, x0, opts, timer);
  const Int& n0 = loc.n0;

  Int K = 15 * H * pi.value;

  // a_k = f(n0 + k) - k q Pi, computed by direct certified evaluation.
  // b: smallest integer in [a_0, a_K) with b = 1 (mod Pi) and b % q != 0.
  auto fa0 = funclib::floored_eval(spec, 0, n0, eval);
  Int ceil_a0 = (fa0.is_integer && *fa0.is_integer) ? fa0.floor : fa0.floor + 1;
  Int b = ceil_a0 + mod_nonneg(1 - ceil_a0, pi.value);
  if (mod_nonneg(b, q) == 0) b += pi.value;  // q and Pi are coprime: one bump suffices

  // a_K - a_0 > 2 Pi, and b < a_K so the congruence target is reachable
  if (!timer.run("gap", [&] {
        return diff_exceeds(spec, n0 + K, n0, Rat(K * q_pi + 2 * pi.value), eval);
      }))
    throw WindowMissed("a_K - a_0 did not exceed 2*Pi");
  if (funclib::certified_cmp(spec, 0, n0 + K, Rat(b + K * q_pi), eval) <= 0)
    throw WindowMissed("congruence target b not strictly below a_K");

  // smallest k0 with a_{k0} >= b: the a_k increase strictly, so bisect and
  // certify the bracket a_{k0-1} < b <= a_{k0} afterwards
  auto reaches_b = [&](const Int& k) {
    return funclib::certified_cmp(spec, 0, n0 + k, Rat(b + k * q_pi), eval) >= 0;
  };
  Int k0(0);
  timer.run("bisect_k0", [&] {
    if (reaches_b(k0)) return;
    Int lo(0), hi(K);
    if (!reaches_b(hi)) throw WindowMissed("a_K fell below b on certified recheck");
    while (hi - lo > 1) {
      Int mid = (lo + hi) / 2;
      (reaches_b(mid) ? hi : lo) = mid;
    }
    k0 = hi;
    if (!reaches_b(k0) || reaches_b(k0 - 1))
      throw InternalContradiction("k0 bracket failed recheck");
  });
  if (funclib::floor_exact(spec, 0, n0 + k0, eval) != b + k0 * q_pi)
    throw WindowMissed("floor(a_k0) differs from b");
  emit(opts, "k0", {{"k0", to_string(k0)}, {"b", to_string(b)}});

  Int n = n0 + k0;
  auto report = timer.run("conditions", [&] { return verifier::check_conditions(spec, n, H, eval); });
  if (!report.pass()) throw WindowMissed("(H1)-(H3) failed at the constructed n");
  auto cert = timer.run("verify", [&] { return verifier::verify_block(spec, n, H, eval); });
  if (!cert.coprimality.all_coprime)
    throw InternalContradiction("conditions pass but the block is not pairwise coprime");
  if (verifier::predicted_block(report) != cert.floors)
    throw InternalContradiction("linearized block differs from directly computed floors");
  emit(opts, "verified", {{"n", to_string(n)}, {"floor_f1", to_string(report.floor_f1)}});

  bool q_probable = ntcore::is_prime(q) == ntcore::Primality::probable_prime;
  return ProofWitness{spec,        H, L_requested, q,  pi,          x0,
                      loc.m,       n0, K,          b,  k0,          n,
                      std::move(report), std::move(cert), q_probable, {}};
}

}  // namespace detail

// Runs the constructive existence proof for a block of H consecutive
// pairwise-coprime floors at offsets ceil(H/2)..H. Every stage is certified;
// any miss escalates the prime q. Only a fully verified witness is returned.
inline ProofWitness seek_witness_for_H(const FunctionSpec& spec, unsigned H, unsigned L_requested,
                                       const SeekOptions& opts = {}) {
  if (H < 2) throw BadArgument("the construction needs H >= 2");
  if (!spec.admissible())
    throw BadArgument("seek requires an admissible spec (leading term c*x^e, c > 0, 1 < e < 2)");
  std::map<std::string, double> timings;
  detail::StageTimer timer(timings);

  auto pi = ntcore::primorial(H);
  Int hp = 100 * H * pi.value;
  Rat second_bound(Int(1), pow_int(hp, 3));
  Int x0 = timer.run("x0", [&] { return funclib::second_derivative_threshold(spec, second_bound, opts.eval); });
  detail::emit(opts, "x0", {{"x0", to_string(x0)}, {"bound", to_string(second_bound)}});

  // smallest admissible prime: q > H and q*Pi above f'(x0+1), so the
  // crossing lands past x0 automatically
  Rat fp_above = funclib::eval(spec, 1, x0 + 1, opts.eval.start_bits, opts.eval).enclosure.hi.to_rat();
  Int q_min = floor_rat(fp_above / Rat(pi.value)) + 1;
  if (q_min < H + 1) q_min = H + 1;
  Int q = ntcore::next_prime_at_least(q_min);

  for (unsigned attempt = 0; attempt <= opts.retries; ++attempt) {
    try {
      detail::emit(opts, "attempt", {{"q", to_string(q)}, {"attempt", std::to_string(attempt)}});
      auto witness = detail::witness_attempt(spec, H, L_requested, q, pi, x0, opts, timings);
      witness.timings_ms = std::move(timings);
      return witness;
    } catch (const WindowMissed& wm) {
      detail::emit(opts, "escalate", {{"q", to_string(q)}, {"reason", wm.what()}});
      q = ntcore::next_prime_at_least(q + 1);
    }
  }
  throw EscalationExhausted("no verified witness within " + std::to_string(opts.retries) +
                            " prime escalations");
}

// User-facing form: a block of at least L+1 consecutive pairwise-coprime
// floors. The construction only covers offsets in [H/2, H], so H = 2L
// restores the requested length.
inline ProofWitness seek_witness(const FunctionSpec& spec, unsigned L, const SeekOptions& opts = {}) {
  if (L < 1) throw BadArgument("block length must be >= 1");
  return seek_witness_for_H(spec, 2 * L, L, opts);
}

struct EvenBlock {
  FunctionSpec spec;
  unsigned H;
  Int n;                   // base point of the located window (or of the scan)
  std::vector<Int> run;    // >= H consecutive arguments with even floors
  std::vector<Int> floors; // matching floors, each certified even twice
  std::map<std::string, double> timings_ms;
};

namespace detail {

inline EvenBlock even_fallback_scan(const FunctionSpec& spec, unsigned H, const SeekOptions& opts,
                                    std::map<std::string, double>& timings) {
  StageTimer timer(timings);
  auto block = timer.run("fallback_scan", [&]() -> EvenBlock {
    std::vector<Int> run, floors;
    for (std::uint64_t step = 0; step < opts.fallback_budget; ++step) {
      Int x = Int(1) + static_cast<unsigned long>(step);
      auto fv = funclib::floored_eval(spec, 0, x, opts.eval);
      if (ntcore::floor_is_even(fv) == ntcore::Parity::even) {
        run.push_back(x);
        floors.push_back(fv.floor);
        if (run.size() >= H) {
          // extend maximally before returning
          Int next = x + 1;
          for (;;) {
            auto nx = funclib::floored_eval(spec, 0, next, opts.eval);
            if (ntcore::floor_is_even(nx) != ntcore::Parity::even) break;
            run.push_back(next);
            floors.push_back(nx.floor);
            next += 1;
          }
          return EvenBlock{spec, H, run.front(), std::move(run), std::move(floors), {}};
        }
      } else {
        run.clear();
        floors.clear();
      }
    }
    throw EscalationExhausted("no run of " + std::to_string(H) +
                              " even floors within the scan budget");
  });
  block.timings_ms = timings;
  return block;
}

}  // namespace detail

// Even-block construction: the window machinery applied to f/2 locates n
// with {f'(n)/2} in ((1/6H), (1/5H)) and |f''| <= 1/(1000 H^3) beyond it;
// scanning h in [0, 10H) then yields >= H consecutive h with
// {f(n+h)/2} in [0, 1/2), i.e. even floors. Non-admissible (rational-path)
// specs fall back to a direct certified scan.
inline EvenBlock seek_even_block(const FunctionSpec& spec, unsigned H, const SeekOptions& opts = {}) {
  if (H < 1) throw BadArgument("run length must be >= 1");
  std::map<std::string, double> timings;
  if (!spec.admissible()) return detail::even_fallback_scan(spec, H, opts, timings);

  detail::StageTimer timer(timings);
  FunctionSpec g = funclib::halved_spec(spec);
  Rat second_bound(Int(1), Int(1000) * pow_int(Int(H), 3));
  Int x0 = timer.run("x0", [&] { return funclib::second_derivative_threshold(spec, second_bound, opts.eval); });
  detail::emit(opts, "x0", {{"x0", to_string(x0)}, {"bound", to_string(second_bound)}});

  Rat gp_above = funclib::eval(g, 1, x0 + 1, opts.eval.start_bits, opts.eval).enclosure.hi.to_rat();
  Int target = floor_rat(gp_above) + 1;

  for (unsigned attempt = 0; attempt <= opts.retries; ++attempt, target += 1) {
    try {
      detail::emit(opts, "attempt", {{"target", to_string(target)}});
      auto loc = detail::locate_window(g, Rat(target), H, x0, opts, timer);
      const Int& n = loc.n0;

      // membership indicators over h = 0..10H-1
      std::vector<bool> inside(10 * static_cast<std::size_t>(H));
      funclib::FracWindow lower_half = funclib::FracWindow::closed_open(Rat(0), Rat(1, 2));
      timer.run("scan_run", [&] {
        for (std::size_t h = 0; h < inside.size(); ++h) {
          auto d = funclib::frac_in_window(g, 0, n + static_cast<unsigned long>(h), lower_half, opts.eval);
          inside[h] = d.membership == funclib::Membership::inside;
        }
      });
      std::size_t best_start = 0, best_len = 0, cur_start = 0, cur_len = 0;
      for (std::size_t h = 0; h <= inside.size(); ++h) {
        if (h < inside.size() && inside[h]) {
          if (cur_len == 0) cur_start = h;
          ++cur_len;
        } else {
          if (cur_len > best_len) {
            best_len = cur_len;
            best_start = cur_start;
          }
          cur_len = 0;
        }
      }
      if (best_len < H)
        throw InternalContradiction(
            "run-not-found: certified window holds but no even run of length H exists");

      std::vector<Int> run, floors;
      timer.run("verify_run", [&] {
        for (std::size_t h = best_start; h < best_start + best_len; ++h) {
          Int x = n + static_cast<unsigned long>(h);
          auto fv = funclib::floored_eval(spec, 0, x, opts.eval);
          if (ntcore::floor_is_even(fv) != ntcore::Parity::even)
            throw InternalContradiction("run member failed the double parity check");
          run.push_back(std::move(x));
          floors.push_back(fv.floor);
        }
      });
      detail::emit(opts, "run", {{"start", to_string(run.front())}, {"length", std::to_string(run.size())}});
      return EvenBlock{spec, H, n, std::move(run), std::move(floors), std::move(timings)};
    } catch (const WindowMissed& wm) {
      detail::emit(opts, "escalate", {{"target", to_string(target)}, {"reason", wm.what()}});
    }
  }
  throw EscalationExhausted("no verified even block within " + std::to_string(opts.retries) +
                            " target escalations");
}

enum class DensityMode { strict, relaxed };

struct DensitySegment {
  Int n;
  unsigned H;
  std::vector<unsigned> offsets;  // ceil(H/2)..H
  std::vector<Int> floors;
};

struct DensityPlan {
  FunctionSpec spec;
  std::vector<DensitySegment> segments;  // disjoint, increasing
  std::vector<Int> all_floors;
  ntcore::PairwiseResult coprimality;  // across the union of all segments
  DensityMode mode;
  std::map<std::string, double> timings_ms;
};

struct DensityOptions {
  DensityMode mode = DensityMode::relaxed;
  std::uint64_t round_budget = 1'000'000;  // candidate bases per relaxed round
  SeekOptions seek;
};

// Builds segments whose floor sets are globally pairwise coprime. Relaxed
// mode scans for each segment and filters by explicit gcds against all
// previously selected floors; strict mode follows the inductive construction
// literally, which makes every round after the first require H_r larger than
// the previous floors themselves.
inline DensityPlan build_density_set(const FunctionSpec& spec, unsigned rounds,
                                     const std::vector<unsigned>& H_schedule,
                                     const DensityOptions& opts = {}) {
  if (rounds < 1) throw BadArgument("at least one round is required");
  if (H_schedule.size() != rounds) throw BadArgument("schedule length must equal rounds");
  for (std::size_t i = 0; i + 1 < H_schedule.size(); ++i)
    if (H_schedule[i] >= H_schedule[i + 1])
      throw BadArgument("H schedule must be strictly increasing");

  std::map<std::string, double> timings;
  detail::StageTimer timer(timings);
  std::vector<DensitySegment> segments;
  std::vector<Int> all_floors;

  if (opts.mode == DensityMode::strict) {
    for (unsigned r = 0; r < rounds; ++r) {
      if (r > 0) {
        Int max_floor(0);
        for (const Int& f : all_floors)
          if (f > max_floor) max_floor = f;
        Int required = max_floor + H_schedule[r - 1] + 1;
        if (Int(H_schedule[r]) < required)
          throw RoundFailed("strict mode needs H_" + std::to_string(r + 1) + " >= " +
                            to_string(required) + " (previous floors dominate); given " +
                            std::to_string(H_schedule[r]));
      }
      auto witness = timer.run("round_" + std::to_string(r + 1), [&] {
        return seek_witness(spec, H_schedule[r], opts.seek);
      });
      if (r > 0 && witness.n <= segments.back().n + segments.back().H)
        throw InternalContradiction("strict segments failed to be increasing");
      segments.push_back({witness.n, witness.H, witness.certificate.offsets,
                          witness.certificate.floors});
      for (const Int& f : witness.certificate.floors) all_floors.push_back(f);
    }
  } else {
    Int next_base(1);
    for (unsigned r = 0; r < rounds; ++r) {
      unsigned H = H_schedule[r];
      auto offsets = verifier::block_offsets(H);
      bool found = false;
      timer.run("round_" + std::to_string(r + 1), [&] {
        Int cand = next_base;
        for (std::uint64_t step = 0; step < opts.round_budget; ++step, cand += 1) {
          std::vector<Int> floors;
          floors.reserve(offsets.size());
          for (unsigned h : offsets)
            floors.push_back(funclib::floor_exact(spec, 0, cand + h, opts.seek.eval));
          if (!ntcore::pairwise_coprime(floors).all_coprime) continue;
          bool clashes = false;
          for (const Int& f : floors) {
            for (const Int& prev : all_floors)
              if (gcd(f, prev) > 1) {
                clashes = true;
                break;
              }
            if (clashes) break;
          }
          if (clashes) continue;
          segments.push_back({cand, H, offsets, floors});
          for (const Int& f : floors) all_floors.push_back(f);
          next_base = cand + H + 1;  // keeps n_i + H_i < n_{i+1}
          found = true;
          return;
        }
      });
      if (!found)
        throw RoundFailed("round " + std::to_string(r + 1) +
                          ": no qualifying block within the scan budget");
    }
  }

  auto coprimality = ntcore::pairwise_coprime(all_floors);
  if (!coprimality.all_coprime)
    throw InternalContradiction("density plan union failed the global coprimality certificate");
  return DensityPlan{spec,      std::move(segments),    std::move(all_floors),
                     std::move(coprimality), opts.mode, std::move(timings)};
}

}  // namespace regseq::seeker

#endif  // REGSEQ_SEEKER_HPP
