#include "hkernel/cli.hpp"

#include "hkernel/constructions.hpp"
#include "hkernel/error.hpp"
#include "hkernel/kernels.hpp"
#include "hkernel/pattern_class.hpp"
#include "hkernel/reachability.hpp"
#include "hkernel/search.hpp"
#include "hkernel/text_format.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <ostream>
#include <sstream>

namespace hkernel {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kSchema = "hkernel/1";

json document(const std::string& command) { return json{{"schema", kSchema}, {"command", command}}; }

std::string join(const std::vector<std::string>& xs, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? sep : "") + xs[i];
  return out;
}

std::vector<std::string> colour_names(const Pattern& p, const std::vector<int>& cs) {
  std::vector<std::string> out;
  for (int c : cs) out.push_back(p.name(c));
  return out;
}

std::vector<std::string> mask_names(const Pattern& p, std::uint32_t mask) {
  std::vector<std::string> out;
  for (int c = 0; c < p.size(); ++c) {
    if ((mask >> c) & 1U) out.push_back(p.name(c));
  }
  return out;
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ',' || ch == ' ') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

int exit_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::SameVertex:
    case ErrorCode::InvalidArgument:
    case ErrorCode::BoundTooLarge:
      return kExitUsage;
    case ErrorCode::Io:
      return kExitNoInput;
    case ErrorCode::Internal:
    case ErrorCode::InvalidCertificate:
      return kExitSoftware;
    case ErrorCode::Interrupted:
      return kExitInterrupted;
    case ErrorCode::BudgetExceeded:
      return kExitUnknown;
    default:
      return kExitData;
  }
}

struct Io {
  std::ostream& out;
  std::ostream& err;
  bool as_json = false;

  void emit(const json& doc, const std::string& text) const {
    if (as_json) {
      out << doc.dump(2) << "\n";
    } else {
      out << text;
    }
  }
};

ColouredMultidigraph load_input_digraph(const std::string& path, const std::string& pattern_path) {
  std::shared_ptr<const Pattern> p;
  if (!pattern_path.empty()) p = std::make_shared<const Pattern>(load_pattern(pattern_path));
  return load_digraph(path, p);
}

// Writes `d` and its pattern next to each other; returns the files written.
std::vector<std::string> write_digraph_pair(const ColouredMultidigraph& d, const std::string& out) {
  const fs::path dg(out);
  fs::path pat = dg;
  pat.replace_extension(".pat");
  if (pat == dg) pat += ".pat";
  write_text_file(pat.string(), serialize_pattern(d.pattern()));
  write_text_file(dg.string(), serialize_digraph(d, pat.filename().string()));
  return {dg.string(), pat.string()};
}

// ---------------------------------------------------------------- classify

int cmd_classify(const Io& io, const std::string& path) {
  const Pattern p = load_pattern(path);
  const bool reflexive = is_reflexive(p);
  const bool transitive = is_transitive(p);
  const B2Analysis b2 = analyse_b2(p);
  const StructuralVerdict s_no = structural_panchromatic(p, false);
  const StructuralVerdict s_yes = structural_panchromatic(p, true);
  std::string panch = !reflexive ? "no" : (s_no.yes == s_yes.yes ? yes_no(s_no.yes) : "open");

  std::ostringstream t;
  json doc = document("classify");
  t << "colours: " << join(p.colours(), " ") << "\n";
  t << "reflexive: " << yes_no(reflexive) << "\n";
  doc["colours"] = p.colours();
  doc["reflexive"] = reflexive;

  t << "transitive: " << yes_no(transitive);
  doc["transitive"] = transitive;
  if (!transitive) {
    for (const auto& q : minimal_nontransitive_family()) {
      if (contains_induced(p, q)) {
        std::string code = canonical_code(q).hex();
        t << " (contains the non-transitive pattern " << code << ")";
        doc["nontransitive_member"] = serialize_pattern(q);
        break;
      }
    }
  }
  t << "\n";

  t << "b2: " << yes_no(b2.member);
  doc["b2"] = b2.member;
  if (b2.reason == B2Reason::NotReflexive) {
    t << " (not reflexive)";
    doc["b2_reason"] = "not-reflexive";
  } else if (b2.reason == B2Reason::OddCycle) {
    auto names = colour_names(p, b2.odd_cycle);
    t << " (odd cycle in complement: " << join(names, " -> ") << " -> " << names.front() << ")";
    doc["b2_reason"] = "odd-cycle";
    doc["odd_cycle"] = names;
  } else {
    doc["b2_reason"] = "member";
  }
  t << "\n";

  auto verdict_text = [&](const StructuralVerdict& v) {
    if (v.not_reflexive) return std::string("no (not reflexive)");
    if (!v.yes) return std::string("no");
    return "yes (V1 = {" + join(mask_names(p, v.part1), " ") + "}, V2 = {" + join(mask_names(p, v.part2), " ") +
           "}, arrangement " + std::to_string(v.arrangement) + ")";
  };
  auto verdict_json = [&](const StructuralVerdict& v) {
    json j{{"yes", v.yes}};
    if (v.not_reflexive) j["reason"] = "not-reflexive";
    if (v.yes) {
      j["part1"] = mask_names(p, v.part1);
      j["part2"] = mask_names(p, v.part2);
      j["arrangement"] = v.arrangement;
    }
    return j;
  };
  t << "panchromatic-if-f1-not: " << verdict_text(s_no) << "\n";
  t << "panchromatic-if-f1: " << verdict_text(s_yes) << "\n";
  t << "panchromatic: " << panch << "\n";
  doc["panchromatic_if_f1_not"] = verdict_json(s_no);
  doc["panchromatic_if_f1"] = verdict_json(s_yes);
  doc["panchromatic"] = panch;

  if (reflexive && p.size() == 3) {
    const CanonicalCode code = canonical_code(p);
    for (const auto& e : three_vertex_catalogue()) {
      if (e.code == code) {
        t << "catalogue: " << join(e.names, " ") << " [" << e.evidence << "]\n";
        doc["catalogue"] = {{"names", e.names}, {"evidence", e.evidence}};
      }
    }
  }
  if (auto w = find_obstruction(p)) {
    t << "obstruction walk: " << join(colour_names(p, w->walk), " ");
    if (!w->blockers.empty()) t << " (blockers " << join(colour_names(p, w->blockers), " ") << ")";
    t << "\n";
    doc["obstruction"] = {{"walk", colour_names(p, w->walk)}, {"blockers", colour_names(p, w->blockers)}};
  }
  io.emit(doc, t.str());
  return kExitOk;
}

// ---------------------------------------------------------------- reach

int cmd_reach(const Io& io, const std::string& path, const std::string& pattern_path, const std::string& u,
              const std::string& v, Semantics sem, std::uint64_t budget) {
  const auto d = load_input_digraph(path, pattern_path);
  const int ui = d.index_of(u);
  const int vi = d.index_of(v);
  if (ui == vi) throw Error(ErrorCode::SameVertex, "reachability needs two distinct vertices");
  json doc = document("reach");
  doc["semantics"] = semantics_name(sem);
  doc["from"] = u;
  doc["to"] = v;
  std::optional<Trail> t;
  try {
    t = sem == Semantics::Walk ? walk_reachable(d, ui, vi) : path_reachable(d, ui, vi, budget);
  } catch (const BudgetExceeded& e) {
    doc["result"] = "unknown";
    doc["budget"] = e.budget();
    io.emit(doc, "unknown: path budget of " + std::to_string(e.budget()) + " expansions exceeded\n");
    return kExitUnknown;
  }
  if (!t) {
    doc["result"] = "unreachable";
    io.emit(doc, "unreachable\n");
    return kExitNegative;
  }
  doc["result"] = "reachable";
  json arcs = json::array();
  for (int a : t->arcs) {
    const Arc& arc = d.arcs()[a];
    arcs.push_back({{"tail", d.name(arc.tail)}, {"head", d.name(arc.head)}, {"colour", d.pattern().name(arc.colour)}});
  }
  doc["certificate"] = arcs;
  io.emit(doc, std::string(semantics_name(sem)) + " " + u + " -> " + v + ":\n" + render_trail(d, *t));
  return kExitOk;
}

// ---------------------------------------------------------------- kernel

int report_exit(const KernelReport& r) {
  switch (r.status) {
    case KernelStatus::Found: return kExitOk;
    case KernelStatus::NoneExists: return kExitNegative;
    case KernelStatus::Unknown: return kExitUnknown;
  }
  return kExitSoftware;
}

json report_json(const ColouredMultidigraph& d, const KernelReport& r) {
  json j{{"status", kernel_status_name(r.status)}, {"nodes", r.nodes}};
  if (r.witness) j["set"] = d.set_to_names(*r.witness);
  if (r.status == KernelStatus::Unknown) j["budget"] = r.budget;
  return j;
}

int cmd_kernel(const Io& io, const std::string& path, const std::string& pattern_path, Semantics sem, bool b2_set,
               std::uint64_t budget) {
  const auto d = load_input_digraph(path, pattern_path);
  json doc = document("kernel");
  std::string text;
  KernelReport r;
  if (b2_set) {
    r = find_independent_H_absorbent(d, budget);
    doc["query"] = "independent-absorbent";
    text = "independent H-absorbent set: " + r.describe(d) + "\n";
    if (in_B2(d.pattern()) && r.status != KernelStatus::Unknown) {
      const VertexSet s = constructive_b2_set(d, budget);
      doc["constructive"] = d.set_to_names(s);
      text += "layered construction: {" + join(d.set_to_names(s), ", ") + "}\n";
    }
  } else {
    r = find_kernel(d, sem, budget);
    doc["query"] = std::string(semantics_name(sem)) + "-kernel";
    text = std::string(semantics_name(sem)) + " kernel: " + r.describe(d) + "\n";
  }
  doc["report"] = report_json(d, r);
  io.emit(doc, text);
  return report_exit(r);
}

// ---------------------------------------------------------------- construct

struct ConstructArgs {
  std::string kind;
  std::vector<std::string> inputs;
  std::string out;
  std::string pattern;
  std::string c0;
  std::string base;
  std::string cycle;
  std::string map;
  std::string kernel;
  int j = 1;
};

int finish_construction(const Io& io, json doc, std::string text, const ColouredMultidigraph& d,
                        const std::optional<GadgetMap>& map, const std::string& out) {
  doc["vertices"] = d.vertex_count();
  doc["arcs"] = d.arc_count();
  doc["pattern_text"] = serialize_pattern(d.pattern());
  doc["digraph_text"] = serialize_digraph(d);
  if (map) doc["map_text"] = serialize_gadget_map(*map);
  text += "vertices: " + std::to_string(d.vertex_count()) + ", arcs: " + std::to_string(d.arc_count()) + "\n";
  if (!out.empty()) {
    auto files = write_digraph_pair(d, out);
    if (map) {
      fs::path mp(out);
      mp.replace_extension(".map");
      write_text_file(mp.string(), serialize_gadget_map(*map));
      files.push_back(mp.string());
    }
    doc["files"] = files;
    text += "wrote: " + join(files, " ") + "\n";
  } else if (!io.as_json) {
    text += serialize_pattern(d.pattern()) + serialize_digraph(d);
    if (map) text += serialize_gadget_map(*map);
  }
  io.emit(doc, text);
  return kExitOk;
}

void need_inputs(const ConstructArgs& a, std::size_t n) {
  if (a.inputs.size() != n) {
    throw Error(ErrorCode::InvalidArgument,
                "construct " + a.kind + " takes " + std::to_string(n) + " input file(s)");
  }
}

int cmd_construct(const Io& io, const ConstructArgs& a, std::uint64_t budget) {
  json doc = document("construct");
  doc["kind"] = a.kind;
  if (a.kind == "linear-sum") {
    need_inputs(a, 2);
    const auto d1 = load_input_digraph(a.inputs[0], a.pattern);
    const auto d2 = load_input_digraph(a.inputs[1], a.pattern);
    std::optional<std::string> c0;
    if (!a.c0.empty() && a.c0 != "fresh") c0 = a.c0;
    auto sum = linear_sum_digraphs(d1, d2, c0);
    const int cross = d1.vertex_count() * d2.vertex_count();
    doc["cross_arcs"] = cross;
    return finish_construction(io, doc, "linear sum with " + std::to_string(cross) + " cross arcs\n", sum.digraph,
                               sum.map, a.out);
  }
  if (a.kind == "family-D" || a.kind == "family-E") {
    need_inputs(a, 0);
    if (a.base.empty()) {
      throw Error(ErrorCode::MissingBaseWitness, a.kind + " needs --base with a witness digraph");
    }
    if (a.j < 1) throw Error(ErrorCode::InvalidArgument, "j must be at least 1");
    const auto base = load_input_digraph(a.base, a.pattern);
    const auto d = linear_sum_family(base, a.j);
    const bool want_path = a.kind == "family-D";
    const auto pk = find_kernel(d, Semantics::Path, budget);
    const auto wk = find_kernel(d, Semantics::Walk, budget);
    const bool ok = want_path ? (pk.status == KernelStatus::Found && wk.status == KernelStatus::NoneExists)
                              : (wk.status == KernelStatus::Found && pk.status == KernelStatus::NoneExists);
    doc["j"] = a.j;
    doc["path_kernel"] = report_json(d, pk);
    doc["walk_kernel"] = report_json(d, wk);
    doc["verified"] = ok;
    std::string text = a.kind + " j=" + std::to_string(a.j) + "\n";
    text += "path kernel: " + pk.describe(d) + "\n";
    text += "walk kernel: " + wk.describe(d) + "\n";
    text += std::string("verified: ") + yes_no(ok) + "\n";
    const int rc = finish_construction(io, doc, text, d, std::nullopt, a.out);
    if (pk.status == KernelStatus::Unknown || wk.status == KernelStatus::Unknown) return kExitUnknown;
    return ok ? rc : kExitNegative;
  }
  if (a.kind == "gadget-f4" || a.kind == "gadget-f5") {
    need_inputs(a, 1);
    std::shared_ptr<const Pattern> p = a.pattern.empty()
                                           ? (a.kind == "gadget-f4" ? f4_gadget_patterns() : f5_gadget_patterns()).original
                                           : std::make_shared<const Pattern>(load_pattern(a.pattern));
    const bool has_ref = a.pattern.empty() && digraph_pattern_ref(read_text_file(a.inputs[0]));
    const auto d = load_digraph(a.inputs[0], has_ref ? nullptr : p);
    auto g = a.kind == "gadget-f4" ? gadget_f4(d) : gadget_f5(d);
    doc["added"] = g.map.hats.size();
    return finish_construction(io, doc, std::to_string(g.map.hats.size()) + " hat vertices added\n", g.digraph,
                               g.map, a.out);
  }
  if (a.kind == "f1-simplify") {
    need_inputs(a, 1);
    const auto d = load_input_digraph(a.inputs[0], a.pattern);
    auto g = f1_simplify(d);
    const std::size_t added = g.map.z1.size() + g.map.z2.size();
    doc["added"] = added;
    return finish_construction(io, doc, std::to_string(added) + " vertices added\n", g.digraph, g.map, a.out);
  }
  if (a.kind == "odd-cycle-witness") {
    need_inputs(a, 1);
    const Pattern h = load_pattern(a.inputs[0]);
    std::vector<std::string> cycle = split_list(a.cycle);
    if (cycle.empty()) {
      const auto c = odd_cycle_in_complement(h);
      if (!c) throw Error(ErrorCode::NotOddCycle, "the complement has no odd cycle");
      cycle = colour_names(h, *c);
    }
    const auto d = odd_cycle_witness(h, cycle);
    doc["cycle"] = cycle;
    return finish_construction(io, doc, "odd cycle: " + join(cycle, " ") + "\n", d, std::nullopt, a.out);
  }
  if (a.kind == "pullback") {
    need_inputs(a, 0);
    if (a.map.empty()) throw Error(ErrorCode::InvalidArgument, "pullback needs --map");
    const GadgetMap m = parse_gadget_map(read_text_file(a.map));
    const auto k = kernel_pullback(split_list(a.kernel), m);
    doc["kernel"] = k;
    io.emit(doc, "{" + join(k, ", ") + "}\n");
    return kExitOk;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown construction '" + a.kind + "'");
}

// ---------------------------------------------------------------- catalogue

int cmd_catalogue(const Io& io, const std::string& which, const std::string& out_dir) {
  if (which != "three-vertex") throw Error(ErrorCode::InvalidArgument, "unknown catalogue '" + which + "'");
  const auto cat = three_vertex_catalogue();
  json doc = document("catalogue");
  json rows = json::array();
  for (const auto& e : cat) {
    rows.push_back({{"code", e.code.hex()},
                    {"names", e.names},
                    {"transitive", e.transitive},
                    {"b2", e.in_b2},
                    {"panchromatic", panchromatic_name(e.panchromatic_by_paths)},
                    {"evidence", e.evidence},
                    {"pattern_text", serialize_pattern(e.pattern)}});
  }
  doc["entries"] = rows;
  std::string text = catalogue_table(cat);
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    for (std::size_t i = 0; i < cat.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "h3-%02zu.pat", i + 1);
      write_text_file((fs::path(out_dir) / name).string(), serialize_pattern(cat[i].pattern));
    }
    text += "wrote " + std::to_string(cat.size()) + " pattern files to " + out_dir + "\n";
  }
  io.emit(doc, text);
  return kExitOk;
}

// ---------------------------------------------------------------- search

struct SearchArgs {
  std::string target;
  std::string pattern;
  std::string custom;
  SearchBounds bounds;
  bool random = false;
  std::uint64_t seed = 0;
  std::uint64_t count = 0;
  int workers = 1;
  std::string state;
  std::string resume;
  std::uint64_t max_instances = 0;
  std::string bundle;
  bool force = false;
  bool quiet = false;
};

SearchTarget target_from_args(const SearchArgs& a) {
  SearchTarget t;
  t.kind = parse_target_kind(a.target);
  if (!a.pattern.empty()) {
    const fs::path pp(a.pattern);
    if (fs::exists(pp)) {
      t.pattern = std::make_shared<const Pattern>(load_pattern(a.pattern));
    } else if (a.pattern == "F1") {
      t.pattern = std::make_shared<const Pattern>(pattern_f1());
    } else if (a.pattern == "F4") {
      t.pattern = std::make_shared<const Pattern>(pattern_f4());
    } else if (a.pattern == "F5") {
      t.pattern = std::make_shared<const Pattern>(pattern_f5());
    } else if (a.pattern == "2K1") {
      t.pattern = std::make_shared<const Pattern>(pattern_two_isolated());
    } else {
      t.pattern = std::make_shared<const Pattern>(load_pattern(a.pattern));
    }
  }
  t.custom = a.custom;
  t.bounds = a.bounds;
  if (a.random) t.mode = {true, a.seed, a.count};
  return t;
}

json stats_json(const SearchStats& s) {
  return json{{"instances_tested", s.instances_tested},
              {"digraph_classes", s.digraph_classes},
              {"dedup_pruned", s.dedup_pruned},
              {"unknown", s.unknown}};
}

int cmd_search(const Io& io, const SearchArgs& a, bool target_given, std::atomic<bool>* stop,
               std::uint64_t budget) {
  SearchState start;
  if (!a.resume.empty()) {
    start = state_from_json(read_text_file(a.resume));
    if (target_given) check_state_matches(start, target_from_args(a));
  } else {
    if (a.target.empty()) throw Error(ErrorCode::InvalidArgument, "search needs --target or --resume");
    start = initial_state(target_from_args(a));
  }
  RunOptions o;
  o.workers = std::max(1, a.workers);
  if (!a.state.empty()) {
    o.state_path = a.state;
  } else if (!a.resume.empty()) {
    o.state_path = a.resume;
  }
  o.max_instances = a.max_instances;
  o.stop = stop;
  // A checkpoint exists only for a target that passed the size guard.
  o.allow_large = a.force || !a.resume.empty();
  o.path_budget = budget;
  auto last = std::chrono::steady_clock::now();
  if (!a.quiet && !io.as_json) {
    o.progress = [&](const SearchState& s) {
      const auto now = std::chrono::steady_clock::now();
      if (now - last < std::chrono::seconds(2)) return;
      last = now;
      io.err << "progress: n=" << s.cursor.n << " m=" << s.cursor.m << " task=" << s.cursor.task
             << " instances=" << s.stats.instances_tested << "\n";
    };
  }
  const SearchOutcome r = resume_search(start, o);
  if (!a.bundle.empty()) write_bundle(r, a.bundle);

  json doc = document("search");
  doc["target"] = json::parse(target_to_json(r.state.target));
  doc["status"] = search_status_name(r.status);
  doc["stats"] = stats_json(r.state.stats);
  std::string text = "status: " + std::string(search_status_name(r.status)) + "\n";
  const auto& st = r.state.stats;
  text += "instances tested: " + std::to_string(st.instances_tested) +
          ", digraph classes: " + std::to_string(st.digraph_classes) + ", unknown: " + std::to_string(st.unknown) +
          "\n";
  if (r.witness) {
    doc["pattern_text"] = serialize_pattern(*r.witness->pattern);
    doc["digraph_text"] = serialize_digraph(r.witness->digraph);
    doc["transcript"] = r.witness->transcript;
    text += serialize_pattern(*r.witness->pattern) + serialize_digraph(r.witness->digraph) + r.witness->transcript;
  }
  if (r.status == SearchStatus::NoneInBounds) {
    doc["certificate"] = r.certificate;
    doc["clean"] = r.clean();
    text += r.certificate;
  }
  if (r.status == SearchStatus::Interrupted && o.state_path) {
    text += "checkpoint: " + *o.state_path + "\n";
    doc["checkpoint"] = *o.state_path;
  }
  if (!a.bundle.empty()) text += "bundle: " + a.bundle + "\n";
  io.emit(doc, text);
  switch (r.status) {
    case SearchStatus::WitnessFound: return kExitOk;
    case SearchStatus::NoneInBounds: return r.clean() ? kExitNegative : kExitUnknown;
    case SearchStatus::Interrupted: return kExitInterrupted;
  }
  return kExitSoftware;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, std::atomic<bool>* stop) {
  CLI::App app{"Kernels by H-walks and H-paths in arc-coloured digraphs", "hkernel"};
  app.require_subcommand(1);
  app.fallthrough();
  bool as_json = false;
  std::uint64_t budget = 0;
  app.add_flag("--json", as_json, "Machine-readable output");
  app.add_option("--budget", budget, "Path-search expansion budget (default: HKERNEL_BUDGET or 10^7)");

  std::string semantics = "path";
  std::string pattern_path;

  auto* classify = app.add_subcommand("classify", "Class memberships of a pattern");
  std::string classify_file;
  classify->add_option("pattern", classify_file, "Pattern file")->required();

  auto* reach = app.add_subcommand("reach", "Walk or path reachability between two vertices");
  std::string reach_file, reach_u, reach_v;
  reach->add_option("digraph", reach_file, "Digraph file")->required();
  reach->add_option("from", reach_u, "Source vertex")->required();
  reach->add_option("to", reach_v, "Target vertex")->required();
  reach->add_option("--semantics", semantics, "walk or path")->check(CLI::IsMember({"walk", "path"}));
  reach->add_option("--pattern", pattern_path, "Pattern file overriding the digraph's reference");

  auto* kernel = app.add_subcommand("kernel", "Kernel by walks or paths");
  std::string kernel_file;
  bool b2_set = false;
  kernel->add_option("digraph", kernel_file, "Digraph file")->required();
  kernel->add_option("--semantics", semantics, "walk or path")->check(CLI::IsMember({"walk", "path"}));
  kernel->add_flag("--b2-set", b2_set, "Independent set absorbent by H-paths instead");
  kernel->add_option("--pattern", pattern_path, "Pattern file overriding the digraph's reference");

  auto* construct = app.add_subcommand("construct", "Build a derived digraph");
  ConstructArgs ca;
  construct->add_option("kind", ca.kind,
                        "linear-sum | family-D | family-E | gadget-f4 | gadget-f5 | f1-simplify | "
                        "odd-cycle-witness | pullback")
      ->required();
  construct->add_option("inputs", ca.inputs, "Input files (family-D/E: the level j)");
  construct->add_option("-o,--out", ca.out, "Output digraph file; pattern and map are written alongside");
  construct->add_option("--pattern", ca.pattern, "Pattern file overriding the inputs' reference");
  construct->add_option("--c0", ca.c0, "Cross-arc colour of a linear sum, or 'fresh'");
  construct->add_option("--base", ca.base, "Base witness digraph of a family");
  construct->add_option("--cycle", ca.cycle, "Odd complement cycle as comma-separated colours");
  construct->add_option("--map", ca.map, "Gadget map file for pullback");
  construct->add_option("--kernel", ca.kernel, "Comma-separated kernel of the derived digraph");

  auto* catalogue = app.add_subcommand("catalogue", "Classified pattern catalogue");
  std::string which = "three-vertex", cat_dir;
  catalogue->add_option("which", which, "three-vertex");
  catalogue->add_option("--out-dir", cat_dir, "Write one pattern file per entry");

  auto* search = app.add_subcommand("search", "Exhaustive or random witness search");
  SearchArgs sa;
  search->add_option("--target", sa.target,
                     "path-kernel-no-walk-kernel | walk-kernel-no-path-kernel | no-path-kernel | "
                     "no-independent-absorbent | minimal-nontransitive-member | custom");
  search->add_option("--pattern", sa.pattern, "Pattern file, or one of F1 F4 F5 2K1");
  search->add_option("--custom", sa.custom, "Custom predicate: walk-path-gap | no-walk-kernel");
  search->add_option("--min-n", sa.bounds.min_vertices, "Least vertex count");
  search->add_option("--max-n", sa.bounds.max_vertices, "Greatest vertex count");
  search->add_option("--max-colours", sa.bounds.max_colours, "Pattern colours when ranging over patterns");
  search->add_option("--max-parallel", sa.bounds.max_parallel, "Arcs per pair per colour");
  search->add_option("--max-arcs-per-pair", sa.bounds.max_arcs_per_pair, "Arcs per pair over all colours (0: no limit)");
  search->add_flag("--random", sa.random, "Random instances instead of exhaustive enumeration");
  search->add_option("--seed", sa.seed, "Random seed");
  search->add_option("--count", sa.count, "Random instance count");
  search->add_option("--workers", sa.workers, "Worker threads")->check(CLI::Range(1, 256));
  search->add_option("--state", sa.state, "Checkpoint file");
  search->add_option("--resume", sa.resume, "Resume from a checkpoint file");
  search->add_option("--max-instances", sa.max_instances, "Stop after this many instances (0: no limit)");
  search->add_option("--bundle", sa.bundle, "Write the outcome bundle to this directory");
  search->add_flag("--force", sa.force, "Allow spaces above 10^10 raw instances");
  search->add_flag("--quiet", sa.quiet, "No progress lines");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    if (auto* sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front()) {
      err << sub->help();
    } else {
      err << app.help();
    }
    return kExitUsage;
  }

  const Io io{out, err, as_json};
  if (budget == 0) budget = default_path_budget();
  try {
    if (*classify) return cmd_classify(io, classify_file);
    if (*reach) return cmd_reach(io, reach_file, pattern_path, reach_u, reach_v, parse_semantics(semantics), budget);
    if (*kernel) return cmd_kernel(io, kernel_file, pattern_path, parse_semantics(semantics), b2_set, budget);
    if (*construct) {
      if (ca.kind == "family-D" || ca.kind == "family-E") {
        if (ca.inputs.size() != 1) throw Error(ErrorCode::InvalidArgument, "construct " + ca.kind + " takes the level j");
        try {
          ca.j = std::stoi(ca.inputs[0]);
        } catch (const std::exception&) {
          throw Error(ErrorCode::InvalidArgument, "level must be an integer");
        }
        ca.inputs.clear();
      }
      return cmd_construct(io, ca, budget);
    }
    if (*catalogue) return cmd_catalogue(io, which, cat_dir);
    if (*search) {
      const bool target_given = !sa.target.empty();
      return cmd_search(io, sa, target_given, stop, budget);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitSoftware;
  }
  return kExitUsage;
}

}  // namespace hkernel
