#ifndef REGSEQ_SCANNER_HPP
#define REGSEQ_SCANNER_HPP

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <thread>
#include <utility>
#include <vector>

#include "regseq/errors.hpp"
#include "regseq/funclib.hpp"
#include "regseq/ntcore.hpp"
#include "regseq/numeric.hpp"

namespace regseq::scanner {

enum class ScanKind { coprime_block, even_block };

// Brute-force search over an n-range. The window is the full h in [0, H]
// (the theorem statements), unlike the verifier's half window.
struct ScanJob {
  FunctionSpec spec;
  Int n_lo{1};
  Int n_hi{1};
  unsigned H = 1;
  ScanKind kind = ScanKind::coprime_block;
  std::uint64_t chunk = 4096;  // must be >= H + 1
  std::optional<Int> budget;   // max number of n processed; partial report beyond
  unsigned threads = 1;        // 0 = hardware concurrency
  funclib::EvalOptions eval;
};

struct ScanHit {
  Int n;
  std::vector<Int> floors;  // floor(f(n+h)) for h = 0..H
};

struct ScanReport {
  std::vector<ScanHit> hits;  // sorted by n
  // per starting index: maximal qualifying block length, capped at H+1
  // (0 for an even-block start with an odd floor)
  std::map<unsigned, std::uint64_t> block_length_histogram;
  Int scanned{0};
  bool budget_exceeded = false;
  std::optional<Int> cursor;  // first unprocessed n; resume token
};

namespace detail {

struct ChunkResult {
  std::vector<ScanHit> hits;
  std::map<unsigned, std::uint64_t> histogram;
};

inline Int scan_floor(const ScanJob& job, const Int& x) {
  if (auto k = funclib::floor_exact_cheap(job.spec, 0, x)) return std::move(*k);
  return funclib::floor_exact(job.spec, 0, x, job.eval);
}

inline ChunkResult scan_chunk(const ScanJob& job, const Int& c_lo, const Int& c_hi) {
  ChunkResult res;
  unsigned H = job.H;
  std::size_t len = mpz_get_ui(Int(c_hi - c_lo + 1 + H).get_mpz_t());
  std::vector<Int> floors;
  floors.reserve(len);
  for (std::size_t i = 0; i < len; ++i)
    floors.push_back(scan_floor(job, c_lo + static_cast<unsigned long>(i)));

  std::size_t starts = len - H;
  if (job.kind == ScanKind::coprime_block) {
    // nearest earlier conflict within distance H; a window [n, n+H] is
    // pairwise coprime iff no member conflicts with another member
    std::vector<std::ptrdiff_t> nearest(len, -1);
    for (std::size_t t = 0; t < len; ++t) {
      std::size_t first = t > H ? t - H : 0;
      for (std::size_t s = t; s-- > first;) {
        if (gcd(floors[s], floors[t]) > 1) {
          nearest[t] = static_cast<std::ptrdiff_t>(s);
          break;
        }
      }
    }
    for (std::size_t ni = 0; ni < starts; ++ni) {
      unsigned run = 0;
      while (run < H + 1 && nearest[ni + run] < static_cast<std::ptrdiff_t>(ni)) ++run;
      ++res.histogram[run];
      if (run == H + 1) {
        std::vector<Int> window(floors.begin() + ni, floors.begin() + ni + H + 1);
        if (!ntcore::pairwise_coprime(window).all_coprime)
          throw InternalContradiction("scan hit failed its re-verification");
        res.hits.push_back({c_lo + static_cast<unsigned long>(ni), std::move(window)});
      }
    }
  } else {
    std::vector<bool> even(len);
    for (std::size_t t = 0; t < len; ++t) even[t] = mpz_even_p(floors[t].get_mpz_t()) != 0;
    for (std::size_t ni = 0; ni < starts; ++ni) {
      unsigned run = 0;
      while (run < H + 1 && even[ni + run]) ++run;
      ++res.histogram[run];
      if (run == H + 1) {
        Int n = c_lo + static_cast<unsigned long>(ni);
        std::vector<Int> window(floors.begin() + ni, floors.begin() + ni + H + 1);
        // re-verify on freshly recomputed floors
        for (unsigned h = 0; h <= H; ++h) {
          Int fresh = scan_floor(job, n + h);
          if (fresh != window[h] || mpz_even_p(fresh.get_mpz_t()) == 0)
            throw InternalContradiction("even-block hit failed its re-verification");
        }
        res.hits.push_back({std::move(n), std::move(window)});
      }
    }
  }
  return res;
}

}  // namespace detail

inline ScanReport scan(const ScanJob& job) {
  if (job.n_lo < 1 || job.n_lo > job.n_hi) throw BadArgument("scan range must satisfy 1 <= n_lo <= n_hi");
  if (job.H < 1) throw BadArgument("scan requires H >= 1");
  if (job.chunk < static_cast<std::uint64_t>(job.H) + 1)
    throw BadArgument("chunk must be >= H + 1");

  ScanReport report;
  Int effective_hi = job.n_hi;
  if (job.budget) {
    if (*job.budget < 1) throw BadArgument("budget must be >= 1");
    Int cap = job.n_lo + *job.budget - 1;
    if (cap < effective_hi) {
      effective_hi = cap;
      report.budget_exceeded = true;
      report.cursor = effective_hi + 1;
    }
  }
  report.scanned = effective_hi - job.n_lo + 1;

  std::vector<std::pair<Int, Int>> chunks;
  for (Int c = job.n_lo; c <= effective_hi; c += job.chunk) {
    Int top = c + (job.chunk - 1);
    if (top > effective_hi) top = effective_hi;
    chunks.emplace_back(c, top);
  }

  std::vector<detail::ChunkResult> results(chunks.size());
  unsigned threads = job.threads == 0 ? std::thread::hardware_concurrency() : job.threads;
  if (threads <= 1 || chunks.size() <= 1) {
    for (std::size_t i = 0; i < chunks.size(); ++i)
      results[i] = detail::scan_chunk(job, chunks[i].first, chunks[i].second);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    auto worker = [&] {
      try {
        for (std::size_t i = next.fetch_add(1); i < chunks.size(); i = next.fetch_add(1))
          results[i] = detail::scan_chunk(job, chunks[i].first, chunks[i].second);
      } catch (...) {
        std::lock_guard<std::mutex> lk(err_mu);
        if (!err) err = std::current_exception();
      }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
  }

  for (auto& r : results) {
    for (auto& h : r.hits) report.hits.push_back(std::move(h));
    for (auto& [k, v] : r.histogram) report.block_length_histogram[k] += v;
  }
  return report;
}

// Max over all length-`window` integer intervals of the covered fraction:
// the finite surrogate of upper Banach density.
inline Rat density_profile(std::vector<Int> selected, unsigned window) {
  if (window < 1) throw BadArgument("window must be >= 1");
  if (selected.empty()) return Rat(0);
  std::sort(selected.begin(), selected.end());
  selected.erase(std::unique(selected.begin(), selected.end()), selected.end());
  std::size_t best = 0, j = 0;
  for (std::size_t i = 0; i < selected.size(); ++i) {
    if (j < i) j = i;
    while (j < selected.size() && selected[j] <= selected[i] + (window - 1)) ++j;
    best = std::max(best, j - i);
  }
  Rat r(static_cast<unsigned long>(best), window);
  r.canonicalize();
  return r;
}

}  // namespace regseq::scanner

#endif  // REGSEQ_SCANNER_HPP
