// regseq: command-line front end for the certified floor-sequence toolkit.
//
// Exit codes: 0 success with certificate, 1 usage error, 2 certified
// negative, 3 precision cap exceeded, 4 budget/escalation exhausted.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "regseq/json_io.hpp"
#include "regseq/regseq.hpp"

namespace {

using regseq::Int;
using regseq::Rat;
using json = nlohmann::json;

struct RunConfig {
  std::string spec_text;
  unsigned precision_cap_bits = 1u << 15;
  std::string mode = "relaxed";
  unsigned retries = 25;
  std::uint64_t budget = 1'000'000;
  std::string output = "json";
  bool trace = false;
  std::uint64_t chunk = 4096;
  unsigned threads = 1;

  void validate() const {
    if (precision_cap_bits < 1 || precision_cap_bits > (1u << 15))
      throw regseq::BadArgument("precision cap must be in [1, 32768]");
    if (retries > 100) throw regseq::BadArgument("retries must be <= 100");
    if (mode != "strict" && mode != "relaxed")
      throw regseq::BadArgument("mode must be 'strict' or 'relaxed'");
    if (output != "json" && output != "csv" && output != "human")
      throw regseq::BadArgument("output must be json, csv or human");
  }

  regseq::funclib::EvalOptions eval_options() const {
    regseq::funclib::EvalOptions e;
    e.cap_bits = precision_cap_bits;
    if (e.start_bits > e.cap_bits) e.start_bits = e.cap_bits;
    return e;
  }

  regseq::seeker::SeekOptions seek_options() const {
    regseq::seeker::SeekOptions s;
    s.retries = retries;
    s.fallback_budget = budget;
    s.eval = eval_options();
    if (trace) {
      s.trace = [](const regseq::seeker::StageEvent& ev) {
        json line{{"stage", ev.stage}};
        for (const auto& [k, v] : ev.fields) line[k] = v;
        std::cerr << line.dump() << "\n";
      };
    }
    return s;
  }
};

// Config file: `key = value` lines, '#' comments. The path comes only from
// the REGSEQ_CONFIG environment variable; command-line flags override.
void load_config(RunConfig& cfg) {
  const char* path = std::getenv("REGSEQ_CONFIG");
  if (path == nullptr || *path == '\0') return;
  std::ifstream in(path);
  if (!in) throw regseq::BadArgument(std::string("cannot open config file: ") + path);
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key == "spec")
      cfg.spec_text = value;
    else if (key == "precision_cap_bits")
      cfg.precision_cap_bits = static_cast<unsigned>(std::stoul(value));
    else if (key == "mode")
      cfg.mode = value;
    else if (key == "retries")
      cfg.retries = static_cast<unsigned>(std::stoul(value));
    else if (key == "budget")
      cfg.budget = std::stoull(value);
    else if (key == "output")
      cfg.output = value;
    else if (key == "chunk")
      cfg.chunk = std::stoull(value);
    else if (key == "threads")
      cfg.threads = static_cast<unsigned>(std::stoul(value));
    else
      throw regseq::BadArgument("unknown config key: " + key);
  }
}

std::pair<Int, Int> parse_range(const std::string& s) {
  auto dots = s.find("..");
  if (dots == std::string::npos)
    throw regseq::BadArgument("range must be written as a..b");
  return {regseq::parse_int(s.substr(0, dots)), regseq::parse_int(s.substr(dots + 2))};
}

regseq::FunctionSpec require_spec(const RunConfig& cfg) {
  if (cfg.spec_text.empty()) throw regseq::BadArgument("--spec is required");
  return regseq::parse_function_spec(cfg.spec_text);
}

void emit_doc(const RunConfig& cfg, const json& doc, const std::string& human,
              const std::string& csv) {
  if (cfg.output == "json")
    std::cout << doc.dump(2) << "\n";
  else if (cfg.output == "csv")
    std::cout << csv;
  else
    std::cout << human;
}

// ---- subcommand bodies -----------------------------------------------------

int run_eval(const RunConfig& cfg, const std::string& n_text) {
  auto spec = require_spec(cfg);
  Int n = regseq::parse_int(n_text);
  auto eval = cfg.eval_options();
  json orders = json::array();
  std::ostringstream csv, human;
  csv << "order,floor,enclosure_lo,enclosure_hi,frac_bits\n";
  human << "f = " << spec.to_string() << ", n = " << n.get_str() << "\n";
  for (int order = 0; order <= 2; ++order) {
    auto fv = regseq::funclib::floored_eval(spec, order, n, eval);
    json o{{"order", order},
           {"floor", regseq::to_string(fv.floor)},
           {"enclosure", regseq::io::to_json(fv.value)}};
    orders.push_back(o);
    csv << order << "," << fv.floor.get_str() << "," << regseq::to_string(fv.value.enclosure.lo.to_rat())
        << "," << regseq::to_string(fv.value.enclosure.hi.to_rat()) << "," << fv.value.frac_bits << "\n";
    human << "  order " << order << ": floor = " << fv.floor.get_str() << "\n";
  }
  json doc{{"command", "eval"}, {"spec", spec.label()}, {"n", regseq::to_string(n)}, {"orders", orders}};
  emit_doc(cfg, doc, human.str(), csv.str());
  return 0;
}

int run_verify(const RunConfig& cfg, const std::string& n_text, unsigned H) {
  auto spec = require_spec(cfg);
  Int n = regseq::parse_int(n_text);
  auto eval = cfg.eval_options();
  auto report = regseq::verifier::check_conditions(spec, n, H, eval);
  auto cert = regseq::verifier::verify_block(spec, n, H, eval);
  json doc{{"command", "verify"},
           {"spec", spec.label()},
           {"report", regseq::io::to_json(report)},
           {"certificate", regseq::io::to_json(cert)}};
  if (report.pass()) {
    auto predicted = regseq::verifier::predicted_block(report);
    if (predicted != cert.floors)
      throw regseq::InternalContradiction("conditions pass but the linearized block differs");
    json pred = json::array();
    for (const Int& v : predicted) pred.push_back(regseq::to_string(v));
    doc["predicted"] = pred;
  }
  std::ostringstream csv, human;
  csv << "condition,pass,detail\n"
      << "h1_frac_f," << report.h1_frac_f.pass << "," << regseq::to_string(report.h1_frac_f.margin) << "\n"
      << "h1_frac_f1," << report.h1_frac_f1.pass << "," << regseq::to_string(report.h1_frac_f1.margin) << "\n"
      << "h1_second," << report.h1_second.pass << "," << regseq::to_string(report.h1_second.margin) << "\n"
      << "h2_divisible," << report.h2_pass << "," << report.h2_remainder.get_str() << "\n"
      << "h3_gcd," << report.h3_pass << "," << report.h3_gcd.get_str() << "\n"
      << "block_coprime," << cert.coprimality.all_coprime << ",\n";
  human << "conditions at n = " << n.get_str() << ", H = " << H << ": "
        << (report.pass() ? "PASS" : "FAIL") << "\n"
        << "block coprime: " << (cert.coprimality.all_coprime ? "yes" : "no") << "\n";
  emit_doc(cfg, doc, human.str(), csv.str());
  return report.pass() ? 0 : 2;
}

int run_seek(const RunConfig& cfg, unsigned L) {
  auto spec = require_spec(cfg);
  auto witness = regseq::seeker::seek_witness(spec, L, cfg.seek_options());
  json doc = regseq::io::to_json(witness);
  doc["command"] = "seek";
  std::ostringstream csv, human;
  csv << "field,value\n"
      << "n," << witness.n.get_str() << "\nq," << witness.q.get_str() << "\nH," << witness.H << "\n";
  for (std::size_t i = 0; i < witness.certificate.floors.size(); ++i)
    csv << "floor_" << witness.certificate.offsets[i] << "," << witness.certificate.floors[i].get_str() << "\n";
  human << "witness n = " << witness.n.get_str() << " (H = " << witness.H << ", q = "
        << witness.q.get_str() << ")\nblock floors pairwise coprime: yes\n";
  emit_doc(cfg, doc, human.str(), csv.str());
  return 0;
}

int run_even(const RunConfig& cfg, unsigned H) {
  auto spec = require_spec(cfg);
  auto block = regseq::seeker::seek_even_block(spec, H, cfg.seek_options());
  json doc = regseq::io::to_json(block);
  doc["command"] = "even";
  std::ostringstream csv, human;
  csv << "index,floor\n";
  for (std::size_t i = 0; i < block.run.size(); ++i)
    csv << block.run[i].get_str() << "," << block.floors[i].get_str() << "\n";
  human << "run of " << block.run.size() << " even floors starting at n = "
        << block.run.front().get_str() << "\n";
  emit_doc(cfg, doc, human.str(), csv.str());
  return 0;
}

int run_density(const RunConfig& cfg, const std::vector<unsigned>& schedule) {
  auto spec = require_spec(cfg);
  regseq::seeker::DensityOptions opts;
  opts.mode = cfg.mode == "strict" ? regseq::seeker::DensityMode::strict
                                   : regseq::seeker::DensityMode::relaxed;
  opts.round_budget = cfg.budget;
  opts.seek = cfg.seek_options();
  auto plan = regseq::seeker::build_density_set(spec, static_cast<unsigned>(schedule.size()),
                                                schedule, opts);
  json doc = regseq::io::to_json(plan);
  doc["command"] = "density";
  std::ostringstream csv, human;
  csv << "segment,n,H,offset,floor\n";
  for (std::size_t s = 0; s < plan.segments.size(); ++s)
    for (std::size_t i = 0; i < plan.segments[s].offsets.size(); ++i)
      csv << s << "," << plan.segments[s].n.get_str() << "," << plan.segments[s].H << ","
          << plan.segments[s].offsets[i] << "," << plan.segments[s].floors[i].get_str() << "\n";
  human << plan.segments.size() << " segments, union of " << plan.all_floors.size()
        << " floors pairwise coprime\n";
  emit_doc(cfg, doc, human.str(), csv.str());
  return 0;
}

int run_scan(const RunConfig& cfg, const std::string& range_text, unsigned H,
             const std::string& kind_text) {
  auto spec = require_spec(cfg);
  auto [lo, hi] = parse_range(range_text);
  regseq::scanner::ScanJob job;
  job.spec = spec;
  job.n_lo = lo;
  job.n_hi = hi;
  job.H = H;
  if (kind_text == "coprime")
    job.kind = regseq::scanner::ScanKind::coprime_block;
  else if (kind_text == "even")
    job.kind = regseq::scanner::ScanKind::even_block;
  else
    throw regseq::BadArgument("--kind must be 'coprime' or 'even'");
  job.chunk = cfg.chunk;
  job.threads = cfg.threads;
  job.budget = Int(static_cast<unsigned long>(cfg.budget));
  job.eval = cfg.eval_options();

  auto report = regseq::scanner::scan(job);
  if (cfg.output == "json") {
    for (const auto& hit : report.hits) std::cout << regseq::io::to_json(hit).dump() << "\n";
    std::cout << regseq::io::scan_summary_json(job, report).dump() << "\n";
  } else if (cfg.output == "csv") {
    std::cout << "n,offset,floor\n";
    for (const auto& hit : report.hits)
      for (std::size_t h = 0; h < hit.floors.size(); ++h)
        std::cout << hit.n.get_str() << "," << h << "," << hit.floors[h].get_str() << "\n";
  } else {
    std::cout << report.hits.size() << " hits in [" << lo.get_str() << ", " << hi.get_str()
              << "] (scanned " << report.scanned.get_str() << ")\n";
    if (report.budget_exceeded)
      std::cout << "budget exceeded; resume from cursor " << report.cursor->get_str() << "\n";
  }
  return report.budget_exceeded ? 4 : 0;
}

int run_oracle(const RunConfig& cfg, const std::string& a_text, unsigned len) {
  Int a = regseq::parse_int(a_text);
  auto best = regseq::ntcore::max_coprime_subset(a, len);
  json witness = json::array();
  for (const Int& v : best.witness) witness.push_back(regseq::to_string(v));
  json doc{{"command", "oracle"},
           {"a", regseq::to_string(a)},
           {"len", len},
           {"size", best.size},
           {"witness", witness}};
  std::ostringstream csv, human;
  csv << "size," << best.size << "\n";
  for (const Int& v : best.witness) csv << "witness," << v.get_str() << "\n";
  human << "max pairwise-coprime subset of {" << a.get_str() << "..{+" << (len - 1)
        << "}} has size " << best.size << "\n";
  emit_doc(cfg, doc, human.str(), csv.str());
  return 0;
}

void emit_error(const std::string& kind, const std::string& message, int code) {
  std::cout << regseq::io::error_record(kind, message, code).dump(2) << "\n";
  std::cerr << "error (" << kind << "): " << message << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  try {
    load_config(cfg);
  } catch (const regseq::Error& e) {
    emit_error(e.kind(), e.what(), static_cast<int>(e.code()));
    return static_cast<int>(e.code());
  }

  CLI::App app{"certified search and verification for floor sequences of regular functions"};
  app.fallthrough();
  app.add_option("--spec", cfg.spec_text, "function spec, e.g. \"x^(3/2)\"");
  app.add_option("--precision-cap", cfg.precision_cap_bits, "fractional-bit cap (<= 32768)");
  app.add_option("--mode", cfg.mode, "strict|relaxed (density builder)");
  app.add_option("--retries", cfg.retries, "escalation retries (<= 100)");
  app.add_option("--budget", cfg.budget, "scan/search budget");
  app.add_option("--output", cfg.output, "json|csv|human");
  app.add_flag("--trace", cfg.trace, "emit one JSON line per proof stage on stderr");
  app.add_option("--chunk", cfg.chunk, "scan chunk size");
  app.add_option("--threads", cfg.threads, "scan worker threads (0 = all cores)");

  std::string n_text, range_text, a_text;
  unsigned H = 2, L = 1, len = 1;
  std::string kind = "coprime";
  std::vector<unsigned> schedule;

  auto* c_eval = app.add_subcommand("eval", "certified floors of f, f', f'' at n");
  c_eval->add_option("--n", n_text)->required();
  auto* c_verify = app.add_subcommand("verify", "check the block conditions and certificate at (n, H)");
  c_verify->add_option("--n", n_text)->required();
  c_verify->add_option("--H", H)->required();
  auto* c_seek = app.add_subcommand("seek", "construct a verified witness for a coprime block of length L+1");
  c_seek->add_option("--L", L)->required();
  auto* c_even = app.add_subcommand("even", "construct a run of >= H consecutive even floors");
  c_even->add_option("--H", H)->required();
  auto* c_density = app.add_subcommand("density", "build a globally coprime segment plan");
  c_density->add_option("--schedule", schedule, "comma-separated H per round, e.g. 2,3,4")
      ->required()
      ->delimiter(',');
  auto* c_scan = app.add_subcommand("scan", "brute-force scan of an n-range");
  c_scan->add_option("--range", range_text, "a..b")->required();
  c_scan->add_option("--H", H)->required();
  c_scan->add_option("--kind", kind, "coprime|even");
  auto* c_oracle = app.add_subcommand("oracle", "exact max pairwise-coprime subset of an interval");
  c_oracle->add_option("--a", a_text)->required();
  c_oracle->add_option("--len", len)->required();
  app.require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;  // usage errors are exit 1; --help is 0
  }

  try {
    cfg.validate();
    if (c_eval->parsed()) return run_eval(cfg, n_text);
    if (c_verify->parsed()) return run_verify(cfg, n_text, H);
    if (c_seek->parsed()) return run_seek(cfg, L);
    if (c_even->parsed()) return run_even(cfg, H);
    if (c_density->parsed()) return run_density(cfg, schedule);
    if (c_scan->parsed()) return run_scan(cfg, range_text, H, kind);
    if (c_oracle->parsed()) return run_oracle(cfg, a_text, len);
    return 1;
  } catch (const regseq::InternalContradiction& e) {
    emit_error(e.kind(), e.what(), static_cast<int>(e.code()));
    return static_cast<int>(e.code());
  } catch (const regseq::Error& e) {
    emit_error(e.kind(), e.what(), static_cast<int>(e.code()));
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    emit_error("internal-error", e.what(), 70);
    return 70;
  }
}
