#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "hkernel/constructions.hpp"
#include "hkernel/enumerate.hpp"
#include "hkernel/error.hpp"
#include "hkernel/kernels.hpp"
#include "hkernel/pattern_class.hpp"
#include "hkernel/search.hpp"
#include "hkernel/text_format.hpp"
#include "oracle.hpp"

#include <filesystem>
#include <random>
#include <thread>

using namespace hkernel;
namespace fs = std::filesystem;

namespace {

std::shared_ptr<const Pattern> share(Pattern p) { return std::make_shared<const Pattern>(std::move(p)); }

SearchTarget walk_not_path_target() {
  SearchTarget t;
  t.kind = TargetKind::WalkKernelNoPathKernel;
  t.bounds.max_vertices = 4;
  t.bounds.max_colours = 3;
  t.bounds.max_arcs_per_pair = 2;
  return t;
}

RunOptions opts(int workers) {
  RunOptions o;
  o.workers = workers;
  o.allow_large = true;
  return o;
}

SearchTarget f1_target(int n) {
  SearchTarget t;
  t.kind = TargetKind::NoPathKernel;
  t.pattern = share(pattern_f1());
  t.bounds.max_vertices = n;
  t.bounds.max_parallel = 1;
  t.bounds.max_arcs_per_pair = 1;
  return t;
}

std::string read_dir(const fs::path& dir) {
  std::string all;
  for (const char* f : {"status.txt", "pattern.pat", "digraph.dg", "transcript.txt", "certificate.txt"}) {
    const auto p = dir / f;
    all += std::string(f) + "\n";
    if (fs::exists(p)) all += read_text_file(p.string());
  }
  return all;
}

fs::path temp_dir(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("hkernel_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

bool oracle_holds(TargetKind kind, const ColouredMultidigraph& d) {
  const bool pk = !oracle::kernels(d, Semantics::Path).empty();
  const bool wk = !oracle::kernels(d, Semantics::Walk).empty();
  switch (kind) {
    case TargetKind::PathKernelNoWalkKernel: return pk && !wk;
    case TargetKind::WalkKernelNoPathKernel: return wk && !pk;
    case TargetKind::NoPathKernel: return !pk;
    case TargetKind::NoIndependentAbsorbent: return !oracle::has_independent_h_absorbent(d);
    default: return false;
  }
}

}  // namespace

TEST_CASE("target predicates agree with brute force") {
  std::mt19937_64 rng(61);
  const TargetKind kinds[] = {TargetKind::PathKernelNoWalkKernel, TargetKind::WalkKernelNoPathKernel,
                              TargetKind::NoPathKernel, TargetKind::NoIndependentAbsorbent};
  for (int i = 0; i < 1500; ++i) {
    auto h = share(oracle::random_pattern(1 + i % 3, rng, i % 5 != 0));
    const auto d = oracle::random_digraph(h, 1 + i % 7, 0.3, rng, 1 + i % 2);
    SearchTarget t;
    t.kind = kinds[i % 4];
    t.pattern = h;
    const auto small = target_holds(t, d, default_path_budget(), true);
    const auto generic = target_holds(t, d, default_path_budget(), false);
    REQUIRE(small.has_value());
    REQUIRE(generic.has_value());
    CHECK(*small == *generic);
    CHECK(*small == oracle_holds(t.kind, d));
  }
}

TEST_CASE("custom predicates") {
  CHECK(custom_predicates().size() == 2);
  const auto d = load_digraph(std::string(HKERNEL_FIXTURES) + "/walk_not_path.dg");
  SearchTarget t;
  t.kind = TargetKind::Custom;
  t.custom = "walk-path-gap";
  CHECK(target_holds(t, d, default_path_budget()) == true);
  t.custom = "no-walk-kernel";
  CHECK(target_holds(t, d, default_path_budget()) == false);
}

TEST_CASE("first witness is the least in enumeration order") {
  // One loopless colour: only single arcs are H-walks.
  auto h = share(new_pattern({"a"}, {}));
  SearchTarget t;
  t.kind = TargetKind::NoPathKernel;
  t.pattern = h;
  t.bounds.max_vertices = 4;
  const auto out = run_search(t);
  REQUIRE(out.status == SearchStatus::WitnessFound);
  std::optional<ColouredMultidigraph> first;
  std::uint64_t before = 0;
  for (const auto& d : enumerate_coloured_digraphs(h, 4, 1)) {
    if (oracle::kernels(d, Semantics::Path).empty()) {
      first = d;
      break;
    }
    ++before;
  }
  REQUIRE(first);
  CHECK(out.witness->digraph_code == canonical_code(*first));
  CHECK(out.witness->digraph.arc_count() == 3);
  CHECK(out.state.stats.digraph_classes == before + 1);
}

TEST_CASE("exhaustive none-in-bounds agrees with brute force") {
  const auto out = run_search(f1_target(3));
  CHECK(out.status == SearchStatus::NoneInBounds);
  CHECK(out.clean());
  CHECK(out.certificate.find("clean: yes") != std::string::npos);
  // Parallel-free F1 digraphs on at most 3 vertices, checked one by one.
  std::uint64_t classes = 0;
  auto f1 = share(pattern_f1());
  for (int n = 1; n <= 3; ++n) {
    const auto alpha = pair_alphabet(3, 1, 1);
    const int slots = n * (n - 1);
    std::vector<int> digit(slots, 0);
    std::set<CanonicalCode> codes;
    while (true) {
      std::vector<std::uint64_t> tokens(static_cast<std::size_t>(n) * n, 0);
      int s = 0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (i != j) tokens[static_cast<std::size_t>(i) * n + j] = alpha.tokens[digit[s++]];
      const auto d = digraph_from_tokens(f1, n, tokens);
      CHECK_FALSE(oracle::kernels(d, Semantics::Path).empty());
      codes.insert(canonical_code(d));
      int pos = 0;
      while (pos < slots && ++digit[pos] == static_cast<int>(alpha.tokens.size())) digit[pos++] = 0;
      if (pos == slots) break;
    }
    classes += codes.size();
  }
  CHECK(out.state.stats.digraph_classes == classes);
}

TEST_CASE("witnesses re-verify and match across worker counts") {
  const auto t = walk_not_path_target();
  const auto a = run_search(t, opts(1));
  REQUIRE(a.status == SearchStatus::WitnessFound);
  CHECK(oracle_holds(t.kind, a.witness->digraph));
  CHECK(a.witness->transcript.find("witness re-verified") != std::string::npos);
  for (int w : {4, 8}) {
    const auto b = run_search(t, opts(w));
    REQUIRE(b.status == SearchStatus::WitnessFound);
    CHECK(b.witness->digraph_code == a.witness->digraph_code);
    CHECK(b.witness->pattern_code == a.witness->pattern_code);
    CHECK(b.witness->transcript == a.witness->transcript);
    CHECK(b.state.stats == a.state.stats);
    CHECK(b.state.cursor == a.state.cursor);
  }
}

TEST_CASE("bundles are byte-identical across worker counts") {
  for (const auto& t : {walk_not_path_target(), f1_target(3)}) {
    const auto d1 = temp_dir("bundle1");
    const auto d8 = temp_dir("bundle8");
    write_bundle(run_search(t, opts(1)), d1.string());
    write_bundle(run_search(t, opts(8)), d8.string());
    CHECK(read_dir(d1) == read_dir(d8));
    fs::remove_all(d1);
    fs::remove_all(d8);
  }
}

TEST_CASE("interrupt and resume reproduce an uninterrupted run") {
  const auto t = walk_not_path_target();
  const auto full = run_search(t, opts(1));
  for (std::uint64_t limit : {1ULL, 5000ULL, 100000ULL}) {
    const auto dir = temp_dir("resume");
    const auto state_path = (dir / "state.json").string();
    RunOptions o = opts(1);
    o.max_instances = limit;
    o.state_path = state_path;
    const auto part = run_search(t, o);
    REQUIRE(part.status == SearchStatus::Interrupted);
    const auto saved = state_from_json(read_text_file(state_path));
    CHECK(saved.cursor == part.state.cursor);
    CHECK(saved.stats == part.state.stats);
    check_state_matches(saved, t);
    RunOptions o2 = opts(3);
    const auto rest = resume_search(saved, o2);
    REQUIRE(rest.status == SearchStatus::WitnessFound);
    CHECK(rest.witness->digraph_code == full.witness->digraph_code);
    CHECK(rest.state.stats == full.state.stats);
    fs::remove_all(dir);
  }
}

TEST_CASE("a checkpoint taken before any work resumes to the full run") {
  const auto t = f1_target(3);
  const auto full = run_search(t);
  const auto resumed = resume_search(state_from_json(state_to_json(initial_state(t))));
  CHECK(resumed.status == full.status);
  CHECK(resumed.state.stats == full.state.stats);
  CHECK(resumed.certificate == full.certificate);
}

TEST_CASE("stop flag interrupts") {
  std::atomic<bool> stop{true};
  RunOptions o = opts(1);
  o.stop = &stop;
  const auto out = run_search(walk_not_path_target(), o);
  CHECK(out.status == SearchStatus::Interrupted);
  CHECK_FALSE(out.state.cursor.finished);
}

TEST_CASE("a stop raised mid-task resumes to the full run") {
  const auto t = f1_target(4);
  const auto full = run_search(t);
  std::atomic<bool> stop{false};
  RunOptions o;
  o.stop = &stop;
  std::thread raiser([&] {
    std::this_thread::sleep_for(std::chrono::milliseconds(300));
    stop = true;
  });
  const auto part = run_search(t, o);
  raiser.join();
  REQUIRE(part.status == SearchStatus::Interrupted);
  CHECK(part.state.stats.instances_tested < full.state.stats.instances_tested);
  const auto rest = resume_search(part.state);
  CHECK(rest.status == full.status);
  CHECK(rest.state.stats == full.state.stats);
  CHECK(rest.certificate == full.certificate);
}

TEST_CASE("stale and mismatched states") {
  const auto t = walk_not_path_target();
  std::string text = state_to_json(initial_state(t));
  const auto pos = text.find("\"version\": 1");
  REQUIRE(pos != std::string::npos);
  std::string old = text;
  old.replace(pos, 12, "\"version\": 0");
  try {
    state_from_json(old);
    FAIL("accepted a stale state");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::StaleState);
  }
  try {
    check_state_matches(state_from_json(text), f1_target(3));
    FAIL("accepted a foreign state");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::StaleState);
  }
  CHECK_THROWS_AS(state_from_json("{"), Error);
}

TEST_CASE("target documents round trip") {
  for (auto t : {walk_not_path_target(), f1_target(4)}) {
    t.mode.random = true;
    t.mode.seed = 99;
    t.mode.count = 10;
    CHECK(target_to_json(target_from_json(target_to_json(t))) == target_to_json(t));
  }
  for (TargetKind k : {TargetKind::PathKernelNoWalkKernel, TargetKind::WalkKernelNoPathKernel,
                       TargetKind::NoPathKernel, TargetKind::NoIndependentAbsorbent,
                       TargetKind::MinimalNontransitiveMember, TargetKind::Custom})
    CHECK(parse_target_kind(target_kind_name(k)) == k);
  CHECK_THROWS_AS(parse_target_kind("bogus"), Error);
}

TEST_CASE("validation and the raw-space guard") {
  SearchTarget t = walk_not_path_target();
  t.bounds.max_vertices = 0;
  CHECK_THROWS_AS(t.validate(), Error);
  SearchTarget np;
  np.kind = TargetKind::NoPathKernel;
  CHECK_THROWS_AS(np.validate(), Error);
  SearchTarget big = walk_not_path_target();
  big.bounds.max_vertices = 6;
  big.bounds.max_arcs_per_pair = 0;
  CHECK(raw_space(big) > kRawGuard);
  try {
    run_search(big);
    FAIL("ran above the guard");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BoundTooLarge);
  }
}

TEST_CASE("random mode is reproducible and independent of workers") {
  SearchTarget t;
  t.kind = TargetKind::NoPathKernel;
  t.pattern = share(new_pattern({"a", "b"}, {{"a", "a"}, {"b", "b"}, {"a", "b"}}));
  t.bounds.max_vertices = 5;
  t.mode = {true, 7, 3000};
  const auto i1 = random_instance(t, 17);
  const auto i2 = random_instance(t, 17);
  CHECK(same_digraph(i1.digraph, i2.digraph));
  CHECK(i1.digraph.vertex_count() == 5);
  const auto a = run_search(t, opts(1));
  const auto b = run_search(t, opts(8));
  CHECK(a.status == b.status);
  CHECK(a.state.stats == b.state.stats);
  if (a.witness) CHECK(same_digraph(a.witness->digraph, b.witness->digraph));
  // Reported witness is the lowest satisfying index.
  std::optional<std::uint64_t> lowest;
  for (std::uint64_t i = 0; i < 3000 && !lowest; ++i)
    if (oracle::kernels(random_instance(t, i).digraph, Semantics::Path).empty()) lowest = i;
  CHECK(a.witness.has_value() == lowest.has_value());
  if (lowest) CHECK(same_digraph(a.witness->digraph, random_instance(t, *lowest).digraph));
}

TEST_CASE("two isolated reflexive colours have no counterexample at four vertices") {
  SearchTarget t;
  t.kind = TargetKind::NoPathKernel;
  t.pattern = share(pattern_two_isolated());
  t.bounds.max_vertices = 4;
  const auto out = run_search(t, opts(4));
  CHECK(out.status == SearchStatus::NoneInBounds);
  CHECK(out.clean());
}

TEST_CASE("subdigraph search") {
  const auto cat = three_vertex_catalogue();
  for (const auto& e : cat) {
    if (!e.obstruction) continue;
    SearchTarget t;
    t.kind = TargetKind::NoPathKernel;
    t.pattern = share(e.pattern);
    const auto base = obstruction_digraph(e.pattern, *e.obstruction);
    const auto out = run_subdigraph_search(t, base);
    REQUIRE(out.status == SearchStatus::WitnessFound);
    const auto& d = out.witness->digraph;
    CHECK(oracle::kernels(d, Semantics::Path).empty());
    CHECK(d.arc_count() <= base.arc_count());
    // No smaller subset works: every proper arc subset of the witness has a path-kernel.
    for (int drop = 0; drop < d.arc_count(); ++drop) {
      std::vector<Arc> arcs = d.arcs();
      arcs.erase(arcs.begin() + drop);
      CHECK_FALSE(oracle::kernels(ColouredMultidigraph(d.pattern_ptr(), d.vertices(), arcs), Semantics::Path).empty());
    }
  }
  SearchTarget t;
  t.kind = TargetKind::NoPathKernel;
  t.pattern = share(pattern_two_isolated());
  for (const auto& e : cat) {
    if (!e.obstruction) continue;
    CHECK_THROWS_AS(run_subdigraph_search(t, obstruction_digraph(e.pattern, *e.obstruction)), Error);
    break;
  }
  const auto h = t.pattern;
  const ColouredMultidigraph two(h, oracle::names(3), {{0, 1, 0}, {1, 2, 1}, {2, 0, 0}, {1, 0, 1}});
  const auto none = run_subdigraph_search(t, two);
  CHECK(none.clean());
  CHECK(none.state.stats.instances_tested == (std::uint64_t{1} << two.dedupe().arc_count()));
}

TEST_CASE("pattern enumeration for multi-pattern targets") {
  SearchTarget t = walk_not_path_target();
  CHECK(target_patterns(t).size() == 20);
  SearchTarget m;
  m.kind = TargetKind::MinimalNontransitiveMember;
  const auto out = run_search(m);
  REQUIRE(out.status == SearchStatus::WitnessFound);
  const auto fam = minimal_nontransitive_family();
  bool member = false;
  for (const auto& q : fam) member = member || isomorphic(q, *out.witness->pattern);
  CHECK(member);
}
