#ifndef REGSEQ_JSON_IO_HPP
#define REGSEQ_JSON_IO_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "regseq/errors.hpp"
#include "regseq/funclib.hpp"
#include "regseq/ntcore.hpp"
#include "regseq/numeric.hpp"
#include "regseq/scanner.hpp"
#include "regseq/seeker.hpp"
#include "regseq/verifier.hpp"

// Serialization of every certificate the toolkit emits, plus the independent
// re-check entry points that rebuild a certificate from its JSON form and
// verify it from scratch. All big integers travel as decimal strings.
namespace regseq::io {

using json = nlohmann::json;

inline json to_json(const Int& v) { return to_string(v); }
inline json to_json(const Rat& v) { return to_string(v); }

inline json to_json(const DyadicInterval& e) {
  return json{{"lo", to_string(e.lo.to_rat())}, {"hi", to_string(e.hi.to_rat())}};
}

inline json to_json(const funclib::CertifiedValue& cv) {
  json j = to_json(cv.enclosure);
  j["frac_bits"] = cv.frac_bits;
  return j;
}

inline json to_json(const verifier::Check& c) {
  return json{{"pass", c.pass}, {"margin", to_string(c.margin)}};
}

inline json to_json(const verifier::ConditionReport& r) {
  return json{{"H", r.H},
              {"n", to_string(r.n)},
              {"h1_frac_f", to_json(r.h1_frac_f)},
              {"h1_frac_f1", to_json(r.h1_frac_f1)},
              {"h1_second", to_json(r.h1_second)},
              {"h2_divisible", json{{"pass", r.h2_pass}, {"remainder", to_string(r.h2_remainder)}}},
              {"h3_gcd", json{{"pass", r.h3_pass}, {"gcd", to_string(r.h3_gcd)}}},
              {"floor_f", to_string(r.floor_f)},
              {"floor_f1", to_string(r.floor_f1)},
              {"pass", r.pass()}};
}

inline json to_json(const ntcore::PairwiseResult& pr) {
  json j{{"coprime", pr.all_coprime}};
  if (pr.failing_pair)
    j["failing_pair"] = json{{"i", pr.failing_pair->i},
                             {"j", pr.failing_pair->j},
                             {"gcd", to_string(pr.failing_pair->g)}};
  return j;
}

inline json to_json(const verifier::BlockCertificate& c) {
  json floors = json::array();
  for (const Int& f : c.floors) floors.push_back(to_string(f));
  json j{{"start", to_string(c.start)}, {"offsets", c.offsets}, {"floors", floors}};
  j.update(to_json(c.coprimality));
  return j;
}

inline json timings_json(const std::map<std::string, double>& t) {
  json j = json::object();
  for (const auto& [k, v] : t) j[k] = v;
  return j;
}

inline json to_json(const seeker::ProofWitness& w) {
  return json{{"spec", w.spec.label()},
              {"H", w.H},
              {"L", w.L_requested},
              {"q", to_string(w.q)},
              {"q_probable", w.q_probable},
              {"primorial", json{{"H", w.primorial.H}, {"value", to_string(w.primorial.value)}}},
              {"x0", to_string(w.x0)},
              {"m", to_string(w.m)},
              {"n0", to_string(w.n0)},
              {"K", to_string(w.K)},
              {"b", to_string(w.b)},
              {"k0", to_string(w.k0)},
              {"n", to_string(w.n)},
              {"report", to_json(w.report)},
              {"certificate", to_json(w.certificate)},
              {"timings_ms", timings_json(w.timings_ms)}};
}

inline json to_json(const seeker::EvenBlock& b) {
  json run = json::array(), floors = json::array();
  for (const Int& x : b.run) run.push_back(to_string(x));
  for (const Int& f : b.floors) floors.push_back(to_string(f));
  return json{{"spec", b.spec.label()}, {"H", b.H},       {"n", to_string(b.n)},
              {"run", run},             {"floors", floors}, {"timings_ms", timings_json(b.timings_ms)}};
}

inline json to_json(const seeker::DensitySegment& s) {
  json floors = json::array();
  for (const Int& f : s.floors) floors.push_back(to_string(f));
  return json{{"n", to_string(s.n)}, {"H", s.H}, {"offsets", s.offsets}, {"floors", floors}};
}

inline json to_json(const seeker::DensityPlan& p) {
  json segs = json::array();
  for (const auto& s : p.segments) segs.push_back(to_json(s));
  json floors = json::array();
  for (const Int& f : p.all_floors) floors.push_back(to_string(f));
  json j{{"spec", p.spec.label()},
         {"mode", p.mode == seeker::DensityMode::strict ? "strict" : "relaxed"},
         {"segments", segs},
         {"all_floors", floors},
         {"timings_ms", timings_json(p.timings_ms)}};
  j.update(to_json(p.coprimality));
  return j;
}

inline json to_json(const scanner::ScanHit& h) {
  json floors = json::array();
  for (const Int& f : h.floors) floors.push_back(to_string(f));
  return json{{"type", "hit"}, {"n", to_string(h.n)}, {"floors", floors}};
}

inline json scan_summary_json(const scanner::ScanJob& job, const scanner::ScanReport& r) {
  json hist = json::object();
  for (const auto& [len, count] : r.block_length_histogram) hist[std::to_string(len)] = count;
  json j{{"type", "summary"},
         {"spec", job.spec.label()},
         {"kind", job.kind == scanner::ScanKind::coprime_block ? "coprime_block" : "even_block"},
         {"H", job.H},
         {"n_lo", to_string(job.n_lo)},
         {"n_hi", to_string(job.n_hi)},
         {"hits", r.hits.size()},
         {"scanned", to_string(r.scanned)},
         {"histogram", hist},
         {"budget_exceeded", r.budget_exceeded}};
  if (r.cursor) j["cursor"] = to_string(*r.cursor);
  return j;
}

inline json error_record(const std::string& kind, const std::string& message, int exit_code) {
  return json{{"error", json{{"kind", kind}, {"message", message}, {"exit_code", exit_code}}}};
}

// ---- independent re-check entry points ------------------------------------
// Each rebuilds the claimed objects from the serialized form and recomputes
// them from scratch through funclib/ntcore/verifier; any mismatch throws.

inline Int int_field(const json& j, const char* key) { return parse_int(j.at(key).get<std::string>()); }

inline void recheck_certificate(const json& j, const FunctionSpec& spec, unsigned H) {
  Int n = int_field(j, "start");
  auto fresh = verifier::verify_block(spec, n, H);
  std::vector<std::string> claimed = j.at("floors").get<std::vector<std::string>>();
  if (claimed.size() != fresh.floors.size())
    throw InternalContradiction("certificate floor count mismatch");
  for (std::size_t i = 0; i < claimed.size(); ++i)
    if (parse_int(claimed[i]) != fresh.floors[i])
      throw InternalContradiction("certificate floor mismatch at offset index " + std::to_string(i));
  if (j.at("coprime").get<bool>() != fresh.coprimality.all_coprime)
    throw InternalContradiction("certificate coprimality flag mismatch");
}

inline void recheck_witness(const json& j) {
  FunctionSpec spec = parse_function_spec(j.at("spec").get<std::string>());
  unsigned H = j.at("H").get<unsigned>();
  Int q = int_field(j, "q");
  Int n = int_field(j, "n");
  Int n0 = int_field(j, "n0");
  Int k0 = int_field(j, "k0");
  Int m = int_field(j, "m");
  Int x0 = int_field(j, "x0");
  Int b = int_field(j, "b");
  auto pi = ntcore::primorial(H);
  if (int_field(j.at("primorial"), "value") != pi.value)
    throw InternalContradiction("primorial mismatch");
  if (int_field(j, "K") != 15 * H * pi.value) throw InternalContradiction("K != 15*H*primorial");
  if (n != n0 + k0 || n0 < m || m < x0) throw InternalContradiction("witness ordering violated");
  if (mod_nonneg(b, pi.value) != 1 || mod_nonneg(b, q) == 0)
    throw InternalContradiction("witness congruence constraints violated");
  if (ntcore::is_prime(q) == ntcore::Primality::composite)
    throw InternalContradiction("witness q is composite");
  if (funclib::floor_exact(spec, 1, n) != q * pi.value)
    throw InternalContradiction("floor(f'(n)) != q * primorial");
  auto report = verifier::check_conditions(spec, n, H);
  if (!report.pass()) throw InternalContradiction("witness conditions do not re-verify");
  auto cert = verifier::verify_block(spec, n, H);
  if (!cert.coprimality.all_coprime) throw InternalContradiction("witness block not pairwise coprime");
  if (verifier::predicted_block(report) != cert.floors)
    throw InternalContradiction("witness block differs from the linearized prediction");
  recheck_certificate(j.at("certificate"), spec, H);
}

inline void recheck_even_block(const json& j) {
  FunctionSpec spec = parse_function_spec(j.at("spec").get<std::string>());
  unsigned H = j.at("H").get<unsigned>();
  auto run = j.at("run").get<std::vector<std::string>>();
  auto floors = j.at("floors").get<std::vector<std::string>>();
  if (run.size() != floors.size() || run.size() < H)
    throw InternalContradiction("even run shorter than H");
  for (std::size_t i = 0; i < run.size(); ++i) {
    Int x = parse_int(run[i]);
    if (i > 0 && x != parse_int(run[i - 1]) + 1)
      throw InternalContradiction("even run not consecutive");
    auto fv = funclib::floored_eval(spec, 0, x);
    if (fv.floor != parse_int(floors[i])) throw InternalContradiction("even run floor mismatch");
    if (ntcore::floor_is_even(fv) != ntcore::Parity::even)
      throw InternalContradiction("even run floor is odd");
  }
}

inline void recheck_density_plan(const json& j) {
  FunctionSpec spec = parse_function_spec(j.at("spec").get<std::string>());
  std::vector<Int> all;
  Int prev_end(-1);
  for (const auto& seg : j.at("segments")) {
    Int n = int_field(seg, "n");
    unsigned H = seg.at("H").get<unsigned>();
    if (prev_end >= 0 && n <= prev_end)
      throw InternalContradiction("density segments not disjoint and increasing");
    prev_end = n + H;
    auto offsets = seg.at("offsets").get<std::vector<unsigned>>();
    auto floors = seg.at("floors").get<std::vector<std::string>>();
    if (offsets != verifier::block_offsets(H))
      throw InternalContradiction("segment offsets are not ceil(H/2)..H");
    if (offsets.size() != floors.size()) throw InternalContradiction("segment floor count mismatch");
    for (std::size_t i = 0; i < offsets.size(); ++i) {
      Int fresh = funclib::floor_exact(spec, 0, n + offsets[i]);
      if (fresh != parse_int(floors[i])) throw InternalContradiction("segment floor mismatch");
      all.push_back(fresh);
    }
  }
  if (all.empty() || !ntcore::pairwise_coprime(all).all_coprime)
    throw InternalContradiction("density plan union not pairwise coprime");
}

}  // namespace regseq::io

#endif  // REGSEQ_JSON_IO_HPP
