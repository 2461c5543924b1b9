#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "trapdyn/dynamics.hpp"
#include "trapdyn/error.hpp"
#include "trapdyn/kernels.hpp"
#include "trapdyn/modfield.hpp"
#include "trapdyn/search.hpp"
#include "trapdyn/traps.hpp"

namespace trapdyn::cli {

namespace {

using json = nlohmann::ordered_json;

constexpr const char* kVersion = "1.0.0";

constexpr const char* kSchemaHelp = R"(JSON schemas:
  trap report (verify --json):
    {"map": str, "p": int, "claim": str, "holds": bool,
     "nilpotency_index": int|null, "witness": [x,y]|null,
     "predicted_untrapped": int, "observed_untrapped": int,
     "mode": "exhaustive"|"sampled", "elapsed_ms": number,
     "expected": str, "error"?: str, "details": object}
    file: {"manifest": manifest, "reports": [trap report...]}
  graph summary (graph --export summary):
    {"p": int, "n": int, "size": int, "cycle_count": int,
     "cycle_spectrum": [int...], "max_tail_depth": int,
     "basin_sizes": [int...]}
  search verdict line (search):
    {"index": int, "map": [str...], "fixed_over_Z": bool,
     "per_prime": [{"p": int, "sorts_correctly": bool, "degenerate": bool,
                    "required_iterate": int|null, "failure_witness": [int...]|null,
                    "reason"?: str, "within_uniform_bound"?: bool}...],
     "overall": "pass"|"fail"}
    final line: {"summary": {"candidate_space", "tested", "rejected_not_fixed",
                 "rejected_exact_range", "rejected_at_prime": {p: count},
                 "degenerate_prime_checks", "passed", "no_primes_tested"}}
  manifest:
    {"command": str, "arguments": [str...], "seed": int|null,
     "versions": {"trapdyn": str, "kernel": str}, "started"?: str,
     "finished"?: str, "outcomes": [{"task": str, "ok": bool}...]}
Environment: TRAPDYN_JOBS (default worker count), TRAPDYN_KERNEL (scalar|avx2).
Exit codes: 0 ok, 1 claim failure, 2 invalid input, 3 budget exceeded.)";

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

class Manifest {
 public:
  Manifest(std::string command, const std::vector<std::string>& args, bool reproducible)
      : reproducible_(reproducible) {
    j_["command"] = std::move(command);
    j_["arguments"] = args;
    j_["seed"] = nullptr;
    j_["versions"] = {{"trapdyn", kVersion}, {"kernel", kernels::backend_name(kernels::active_backend())}};
    if (!reproducible_) j_["started"] = utc_now();
    j_["outcomes"] = json::array();
  }
  void set_seed(std::uint64_t seed) { j_["seed"] = seed; }
  void outcome(const std::string& task, bool ok) { j_["outcomes"].push_back({{"task", task}, {"ok", ok}}); }
  json finish() {
    if (!reproducible_) j_["finished"] = utc_now();
    return j_;
  }

 private:
  bool reproducible_;
  json j_;
};

struct LoadedMap {
  PolyMap map;
  std::optional<BuiltinMap> builtin;
};

LoadedMap load_map(const std::string& spec) {
  if (auto b = builtin_from_name(spec)) return {builtin(*b), b};
  if (std::filesystem::is_regular_file(spec)) {
    std::ifstream in(spec);
    std::stringstream buf;
    buf << in.rdbuf();
    PolyMap m = parse_map(buf.str());
    m.name = std::filesystem::path(spec).stem().string();
    return {std::move(m), std::nullopt};
  }
  throw Error(ErrorCode::unknown_map, "unknown map '" + spec +
                                          "': expected additive_trap, multiplicative_trap, power_trap or a map file");
}

std::uint64_t parse_u64(const std::string& s, const char* what) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    if (!s.empty() && s[0] == '-') throw std::invalid_argument("negative");
    v = std::stoull(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) throw Error(ErrorCode::out_of_range, std::string("bad ") + what + " '" + s + "'");
  return v;
}

bool write_text(const std::string& path, const std::string& text, std::ostream& err) {
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    err << "error: cannot write " << path << '\n';
    return false;
  }
  f << text;
  return true;
}

std::string point_text(const std::vector<ExtElement>& pt) {
  std::string s = "(";
  for (std::size_t i = 0; i < pt.size(); ++i) s += (i ? "," : "") + pt[i].to_string();
  return s + ")";
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

struct VerifyArgs {
  std::string map;
  std::string primes;
  std::string claims = "trap";
  bool exhaustive = false;
  bool sampled = false;
  bool full_plane = false;
  std::uint64_t seed = VerifyOptions{}.seed;
  std::uint64_t samples = VerifyOptions{}.sample_count;
  std::uint64_t budget = kDefaultGraphBudget;
  unsigned jobs = 0;
  std::string json_out;
  bool reproducible = false;
};

std::string note_for(const TrapReport& r) {
  if (r.error) return *r.error;
  std::string note;
  if (r.claim == Claim::multiplicative_trap && r.details.contains("two_is_generator") &&
      !r.details["two_is_generator"].get<bool>()) {
    note = "conditional claim: 2 not a generator";
    if (r.witness) note += "; untrapped witness " + r.witness->to_string();
  } else if (r.claim == Claim::ratio_recurrence && !r.details["printed_orientation_holds"].get<bool>()) {
    note = "u/v orientation fails";
  } else if (r.claim == Claim::power_trap_fermat) {
    note = "k=" + r.details["k"].dump() + ", k iterations suffice: " + r.details["k_iterations_suffice"].dump();
  } else if (r.details.contains("degenerate")) {
    note = "degenerate prime";
  }
  if (!r.holds && r.witness) note += (note.empty() ? "" : "; ") + std::string("counterexample ") + r.witness->to_string();
  return note;
}

int cmd_verify(const VerifyArgs& a, const std::vector<std::string>& raw, std::ostream& out, std::ostream& err) {
  std::vector<std::uint64_t> primes;
  LoadedMap loaded;
  const bool all = a.map == "all";
  ClaimSet claims = ClaimSet::trap;
  try {
    primes = parse_primes(a.primes);
    if (!all) loaded = load_map(a.map);
    if (a.claims == "ratio") {
      claims = ClaimSet::ratio;
    } else if (a.claims == "all") {
      claims = ClaimSet::all;
    } else if (a.claims != "trap") {
      throw Error(ErrorCode::out_of_range, "--claims must be trap, ratio or all");
    }
    if (a.exhaustive && a.sampled) throw Error(ErrorCode::out_of_range, "--exhaustive and --sampled are exclusive");
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  }

  VerifyOptions opt;
  opt.seed = a.seed;
  opt.sample_count = a.samples;
  opt.jobs = a.jobs;
  opt.graph.jobs = a.jobs;
  opt.graph.max_points = a.budget;
  opt.full_plane = a.full_plane || a.exhaustive;
  if (a.exhaustive) opt.allow_sampling = false;
  if (a.sampled) opt.graph.max_points = 1;

  std::vector<TrapReport> reports;
  try {
    if (all) {
      reports = verify_all(primes, opt);
    } else if (loaded.builtin) {
      reports = verify_map(*loaded.builtin, primes, claims, opt);
    } else {
      for (auto p : primes) reports.push_back(verify_attractor(loaded.map, p, opt));
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::size_bound_exceeded ? kBudgetExceeded : kInvalidInput;
  }

  bool all_hold = true;
  bool budget_failure = false;
  out << std::left << std::setw(22) << "map" << std::setw(8) << "p" << std::setw(30) << "claim" << std::setw(7)
      << "holds" << std::setw(8) << "index" << std::setw(12) << "mode"
      << "note\n";
  for (const auto& r : reports) {
    all_hold = all_hold && r.holds;
    if (r.error && r.error->find("budget") != std::string::npos) budget_failure = true;
    out << std::left << std::setw(22) << r.map_name << std::setw(8) << r.p << std::setw(30) << claim_name(r.claim)
        << std::setw(7) << (r.holds ? "yes" : "NO") << std::setw(8)
        << (r.nilpotency_index ? std::to_string(*r.nilpotency_index) : "-") << std::setw(12) << mode_name(r.mode)
        << note_for(r) << '\n';
  }
  out << reports.size() << " report(s), " << (all_hold ? "all claims hold" : "CLAIM FAILURE") << '\n';

  if (!a.json_out.empty()) {
    Manifest m("verify", raw, a.reproducible);
    m.set_seed(a.seed);
    json arr = json::array();
    for (const auto& r : reports) {
      arr.push_back(to_json(r, a.reproducible));
      m.outcome(r.map_name + " p=" + std::to_string(r.p) + " " + std::string(claim_name(r.claim)), r.holds);
    }
    json doc;
    doc["manifest"] = m.finish();
    doc["reports"] = arr;
    if (!write_text(a.json_out, doc.dump(2) + "\n", err)) return kInvalidInput;
  }
  if (budget_failure) return kBudgetExceeded;
  return all_hold ? kOk : kClaimFailure;
}

// ---------------------------------------------------------------------------
// orbit / graph
// ---------------------------------------------------------------------------

int cmd_orbit(const std::string& map_spec, const std::string& p_text, const std::vector<std::string>& coords,
              std::optional<std::uint64_t> max_steps, std::ostream& out, std::ostream& err) {
  PolyMap map;
  Point start;
  try {
    map = load_map(map_spec).map;
    const std::uint64_t p = parse_u64(p_text, "prime");
    require_prime(p);
    if (coords.size() != map.num_vars) {
      throw Error(ErrorCode::dimension_mismatch,
                  "expected " + std::to_string(map.num_vars) + " coordinates, got " + std::to_string(coords.size()));
    }
    std::vector<Residue> c;
    for (const auto& s : coords) c.push_back(static_cast<Residue>(parse_u64(s, "coordinate") % p));
    start = Point(std::move(c), static_cast<Residue>(p));
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  }

  std::uint64_t steps = 1;
  for (std::size_t i = 0; i < map.num_vars; ++i) {
    steps = steps > std::numeric_limits<std::uint64_t>::max() / start.modulus ? std::numeric_limits<std::uint64_t>::max()
                                                                             : steps * start.modulus;
  }
  OrbitSummary s;
  try {
    s = orbit(map, start, max_steps.value_or(steps));
  } catch (const Error& e) {
    err << "error: " << e.what() << "; raise --max-steps\n";
    return e.code() == ErrorCode::budget_exceeded ? kBudgetExceeded : kInvalidInput;
  }

  constexpr std::uint64_t kMaxPrinted = 200;
  const std::uint64_t length = s.tail_length + s.cycle_length;
  Point cur = start;
  out << cur.to_string();
  for (std::uint64_t i = 1; i <= std::min(length, kMaxPrinted); ++i) {
    cur = map_evaluate(map, cur);
    out << " -> " << cur.to_string();
  }
  if (length > kMaxPrinted) out << " -> ...";
  out << '\n';
  const Point zero(std::vector<Residue>(map.num_vars, 0), start.modulus);
  out << "tail length " << s.tail_length << ", cycle length " << s.cycle_length << '\n';
  if (s.hits_target) {
    out << "reaches " << zero.to_string() << " after " << *s.steps_to_target << " step(s)";
    if (s.cycle_length == 1 && s.steps_to_target == s.tail_length) out << " and stays there";
    out << '\n';
  } else {
    out << "never reaches " << zero.to_string() << "; cycle detected (length " << s.cycle_length << ")\n";
  }
  return kOk;
}

int cmd_graph(const std::string& map_spec, const std::string& p_text, const std::string& format,
              const std::string& out_path, std::uint64_t budget, std::ostream& out, std::ostream& err) {
  PolyMap map;
  std::uint64_t p = 0;
  try {
    map = load_map(map_spec).map;
    p = parse_u64(p_text, "prime");
    require_prime(p);
    if (format != "summary" && format != "edges") throw Error(ErrorCode::out_of_range, "--export must be summary or edges");
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  }
  GraphOptions opt;
  opt.max_points = budget;
  std::optional<FunctionalGraph> g;
  try {
    g = build_graph(map, static_cast<Residue>(p), opt);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::size_bound_exceeded) {
      err << "error: " << e.what() << "\nhint: the full graph does not fit; inspect single orbits with 'orbit'\n";
      return kBudgetExceeded;
    }
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  }
  std::ostringstream text;
  if (format == "edges") {
    write_edge_list(text, *g);
  } else {
    text << graph_summary_json(*g, 2) << '\n';
  }
  if (out_path.empty()) {
    out << text.str();
  } else if (!write_text(out_path, text.str(), err)) {
    return kInvalidInput;
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// ext / search
// ---------------------------------------------------------------------------

int cmd_ext(const std::string& map_spec, const std::string& p_text, const std::string& k_text,
            const std::string& modulus_text, std::ostream& out, std::ostream& err) {
  PolyMap map;
  ExtFieldPtr field;
  try {
    map = load_map(map_spec).map;
    const std::uint64_t p = parse_u64(p_text, "prime");
    const std::uint64_t k = parse_u64(k_text, "degree");
    require_prime(p);
    std::optional<std::vector<Residue>> modulus;
    if (!modulus_text.empty()) {
      std::string t = modulus_text;
      std::replace(t.begin(), t.end(), 't', 'x');
      const Polynomial poly = parse(t, 1);
      std::vector<Residue> coeffs(poly.degree() + 1, 0);
      for (const auto& term : poly.terms()) coeffs[term.exponents[0]] = reduce(term.coefficient, static_cast<Residue>(p));
      modulus = coeffs;
    }
    field = make_ext_field(p, static_cast<unsigned>(k), modulus);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::size_bound_exceeded ? kBudgetExceeded : kInvalidInput;
  }

  std::vector<ExtPeriodicPoint> periodic;
  try {
    periodic = periodic_points_ext(map, field);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::size_bound_exceeded ? kBudgetExceeded : kInvalidInput;
  }

  out << "field GF(" << field->p() << "^" << field->k() << "), modulus " << field->modulus_string() << '\n';
  out << "periodic points: " << periodic.size() << '\n';
  auto key = [](const std::vector<ExtElement>& pt) {
    std::vector<std::uint64_t> k;
    for (const auto& e : pt) k.push_back(e.index());
    return k;
  };
  std::set<std::vector<std::uint64_t>> seen;
  std::size_t nonzero_cycles = 0;
  for (const auto& pp : periodic) {
    if (seen.count(key(pp.point))) continue;
    const bool zero = std::all_of(pp.point.begin(), pp.point.end(), [](const ExtElement& e) { return e.is_zero(); });
    std::vector<std::vector<ExtElement>> cycle{pp.point};
    seen.insert(key(pp.point));
    for (std::uint64_t i = 1; i < pp.period; ++i) {
      std::vector<ExtElement> next;
      for (const auto& c : map.components) next.push_back(ext_eval_poly(c, cycle.back()));
      seen.insert(key(next));
      cycle.push_back(std::move(next));
    }
    if (zero) {
      out << "fixed point " << point_text(pp.point) << " (zero)\n";
      continue;
    }
    ++nonzero_cycles;
    out << pp.period << "-cycle: ";
    for (std::size_t i = 0; i < cycle.size(); ++i) out << (i ? " -> " : "") << point_text(cycle[i]);
    out << '\n';
  }
  if (nonzero_cycles == 0) out << "no nonzero periodic points\n";
  return kOk;
}

int cmd_search(const std::string& config_path, const std::string& out_path, bool reproducible,
               const std::vector<std::string>& raw, std::ostream& out, std::ostream& err) {
  SearchConfig config;
  try {
    std::ifstream in(config_path);
    if (!in) throw Error(ErrorCode::invalid_config, "cannot read config file " + config_path);
    std::stringstream buf;
    buf << in.rdbuf();
    config = parse_search_config(buf.str());
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  }
  Manifest manifest("search", raw, reproducible);
  SearchResult result;
  try {
    result = run_search(config);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  }
  manifest.outcome("search", true);
  std::ostringstream text;
  text << json{{"manifest", manifest.finish()}}.dump() << '\n';
  write_verdict_stream(text, result);
  if (out_path.empty()) {
    out << text.str();
  } else if (!write_text(out_path, text.str(), err)) {
    return kInvalidInput;
  }
  return kOk;
}

}  // namespace

std::vector<std::uint64_t> parse_primes(const std::string& spec) {
  std::vector<std::uint64_t> out;
  if (spec.empty()) throw Error(ErrorCode::out_of_range, "no primes given");
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (const auto dots = item.find(".."); dots != std::string::npos) {
      const std::uint64_t lo = parse_u64(item.substr(0, dots), "range bound");
      const std::uint64_t hi = parse_u64(item.substr(dots + 2), "range bound");
      for (std::uint64_t v = lo; v <= hi; ++v) {
        if (is_prime(v)) out.push_back(v);
      }
    } else {
      const std::uint64_t v = parse_u64(item, "prime");
      require_prime(v);
      out.push_back(v);
    }
  }
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dynamics of integer polynomial trap maps modulo primes", "trapdyn"};
  app.require_subcommand(1);
  app.footer(kSchemaHelp);
  app.set_version_flag("--version", kVersion);
  std::string kernel;
  app.add_option("--kernel", kernel, "Force a kernel backend (scalar|avx2)");

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Check the trap claims for a map over a set of primes");
  verify->add_option("map", va.map, "additive_trap | multiplicative_trap | power_trap | all | map file")->required();
  verify->add_option("--primes", va.primes, "e.g. 2..199, 7 or 3,5,17")->required();
  verify->add_option("--claims", va.claims, "trap (default), ratio or all");
  verify->add_flag("--exhaustive", va.exhaustive, "Never sample; stream full planes for Fermat checks");
  verify->add_flag("--sampled", va.sampled, "Force sampled mode");
  verify->add_flag("--full-plane", va.full_plane, "Stream the full plane for Fermat checks above the budget");
  verify->add_option("--seed", va.seed, "Seed for sampled mode");
  verify->add_option("--samples", va.samples, "Points per sampled check");
  verify->add_option("--budget", va.budget, "Largest plane enumerated as a graph");
  verify->add_option("--jobs", va.jobs, "Worker threads (default: TRAPDYN_JOBS or all cores)");
  verify->add_option("--json", va.json_out, "Write the JSON report here");
  verify->add_flag("--reproducible", va.reproducible, "Omit timestamps and timings from JSON output");

  std::string o_map, o_p;
  std::vector<std::string> o_coords;
  std::optional<std::uint64_t> o_max;
  auto* orbit_cmd = app.add_subcommand("orbit", "Trajectory of one point with tail/cycle annotation");
  orbit_cmd->add_option("map", o_map)->required();
  orbit_cmd->add_option("p", o_p)->required();
  orbit_cmd->add_option("coords", o_coords)->required();
  orbit_cmd->add_option("--max-steps", o_max, "Orbit length budget (default p^n)");

  std::string g_map, g_p, g_export = "summary", g_out;
  std::uint64_t g_budget = kDefaultGraphBudget;
  auto* graph_cmd = app.add_subcommand("graph", "Functional graph export");
  graph_cmd->add_option("map", g_map)->required();
  graph_cmd->add_option("p", g_p)->required();
  graph_cmd->add_option("--export", g_export, "summary (JSON) or edges");
  graph_cmd->add_option("--out", g_out, "Write to a file instead of stdout");
  graph_cmd->add_option("--budget", g_budget, "Largest point count to enumerate");

  std::string e_map, e_p, e_k, e_modulus;
  auto* ext_cmd = app.add_subcommand("ext", "Periodic points over GF(p^k)");
  ext_cmd->add_option("map", e_map)->required();
  ext_cmd->add_option("p", e_p)->required();
  ext_cmd->add_option("k", e_k)->required();
  ext_cmd->add_option("--modulus", e_modulus, "Monic irreducible in t, e.g. \"t^2+t+1\"");

  std::string s_config, s_out;
  bool s_repro = false;
  auto* search_cmd = app.add_subcommand("search", "Bounded search for two-fixed-point sorting maps");
  search_cmd->add_option("config", s_config, "key = value config file")->required();
  search_cmd->add_option("--out", s_out, "Write the JSON-lines stream to a file");
  search_cmd->add_flag("--reproducible", s_repro, "Omit timestamps from the manifest line");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInvalidInput;
  }

  if (!kernel.empty()) {
    const auto b = kernels::backend_from_name(kernel);
    if (!b) {
      err << "error: unknown kernel '" << kernel << "'\n";
      return kInvalidInput;
    }
    if (!kernels::backend_available(*b)) {
      err << "error: kernel '" << kernel << "' is not available on this CPU\n";
      return kInvalidInput;
    }
    kernels::set_backend_override(*b);
  }

  int code = kOk;
  if (verify->parsed()) {
    code = cmd_verify(va, args, out, err);
  } else if (orbit_cmd->parsed()) {
    code = cmd_orbit(o_map, o_p, o_coords, o_max, out, err);
  } else if (graph_cmd->parsed()) {
    code = cmd_graph(g_map, g_p, g_export, g_out, g_budget, out, err);
  } else if (ext_cmd->parsed()) {
    code = cmd_ext(e_map, e_p, e_k, e_modulus, out, err);
  } else if (search_cmd->parsed()) {
    code = cmd_search(s_config, s_out, s_repro, args, out, err);
  }
  if (!kernel.empty()) kernels::set_backend_override(std::nullopt);
  return code;
}

}  // namespace trapdyn::cli
