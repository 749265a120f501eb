#ifndef REGSEQ_VERIFIER_HPP
#define REGSEQ_VERIFIER_HPP

#include <utility>
#include <vector>

#include "regseq/errors.hpp"
#include "regseq/funclib.hpp"
#include "regseq/ntcore.hpp"
#include "regseq/numeric.hpp"

namespace regseq::verifier {

struct Check {
  bool pass = false;
  Rat margin{0};  // certified distance to the decision boundary
};

// Certified evaluation of the block-linearization hypotheses at (spec, n, H):
//   {f(n)} <= 1/3,   {f'(n)} in [1/(9H), 1/(3H)],
//   |f''(x)| <= 1/(10 H^2) on [n, n+H],
//   primorial(H) divides floor(f'(n)),   gcd(floor(f(n)), floor(f'(n))) = 1.
struct ConditionReport {
  unsigned H = 0;
  Int n;
  Check h1_frac_f;
  Check h1_frac_f1;
  Check h1_second;
  bool h2_pass = false;
  Int h2_remainder;  // floor(f'(n)) mod primorial(H)
  bool h3_pass = false;
  Int h3_gcd;  // gcd(floor(f(n)), floor(f'(n)))
  Int floor_f;
  Int floor_f1;

  bool pass() const { return h1_frac_f.pass && h1_frac_f1.pass && h1_second.pass && h2_pass && h3_pass; }
};

struct BlockCertificate {
  Int start;
  std::vector<unsigned> offsets;  // strictly increasing, ceil(H/2)..H
  std::vector<Int> floors;        // floor(f(start + offset)) computed directly
  ntcore::PairwiseResult coprimality;
};

inline std::vector<unsigned> block_offsets(unsigned H) {
  std::vector<unsigned> off;
  for (unsigned h = (H + 1) / 2; h <= H; ++h) off.push_back(h);
  return off;
}

// Closed inequalities decided as certified <= comparisons: exact boundary
// hits (possible only on the rational fast path) count as pass.
inline ConditionReport check_conditions(const FunctionSpec& spec, const Int& n, unsigned H,
                                        const funclib::EvalOptions& opts = {}) {
  if (H < 2) throw BadArgument("conditions are stated for H >= 2");
  if (n < 1) throw BadArgument("n must all be >= 1");
  ConditionReport rep;
  rep.H = H;
  rep.n = n;

  auto ff = funclib::frac_in_window(spec, 0, n, funclib::FracWindow::closed(Rat(0), Rat(1, 3)), opts);
  rep.h1_frac_f = {ff.membership == funclib::Membership::inside, ff.margin};
  rep.floor_f = ff.floor;

  Rat lo(Int(1), Int(9) * H), hi(Int(1), Int(3) * H);
  auto ff1 = funclib::frac_in_window(spec, 1, n, funclib::FracWindow::closed(lo, hi), opts);
  rep.h1_frac_f1 = {ff1.membership == funclib::Membership::inside, ff1.margin};
  rep.floor_f1 = ff1.floor;

  Rat second_bound(Int(1), Int(10) * H * H);
  auto sb = funclib::second_abs_within(spec, n, n + H, second_bound, opts);
  rep.h1_second = {sb.pass, sb.margin};

  Int pi = ntcore::primorial(H).value;
  rep.h2_remainder = mod_nonneg(rep.floor_f1, pi);
  rep.h2_pass = rep.h2_remainder == 0;

  rep.h3_gcd = gcd(rep.floor_f, rep.floor_f1);
  rep.h3_pass = rep.h3_gcd == 1;
  return rep;
}

// The linearized block floor(f(n)) + h * floor(f'(n)) for h in ceil(H/2)..H,
// valid only under a passing report; never re-evaluates f.
inline std::vector<Int> predicted_block(const ConditionReport& report) {
  if (!report.pass())
    throw RejectedWithoutConditions("the linearization identity is only guaranteed under (H1)-(H3)");
  std::vector<Int> out;
  for (unsigned h : block_offsets(report.H)) out.push_back(report.floor_f + h * report.floor_f1);
  return out;
}

inline std::vector<Int> predicted_block(const FunctionSpec& spec, const Int& n, unsigned H,
                                        const funclib::EvalOptions& opts = {}) {
  return predicted_block(check_conditions(spec, n, H, opts));
}

// Direct certificate: floors recomputed one by one (the identity is a
// theorem to be tested, not an optimization to be trusted), then the
// pairwise-gcd evidence.
inline BlockCertificate verify_block(const FunctionSpec& spec, const Int& n, unsigned H,
                                     const funclib::EvalOptions& opts = {}) {
  if (H < 1) throw BadArgument("block verification requires H >= 1");
  if (n < 1) throw BadArgument("n must be >= 1");
  BlockCertificate cert;
  cert.start = n;
  cert.offsets = block_offsets(H);
  for (unsigned h : cert.offsets) cert.floors.push_back(funclib::floor_exact(spec, 0, n + h, opts));
  cert.coprimality = ntcore::pairwise_coprime(cert.floors);
  return cert;
}

}  // namespace regseq::verifier

#endif  // REGSEQ_VERIFIER_HPP
