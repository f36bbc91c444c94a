#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "hkernel/error.hpp"
#include "hkernel/pattern_class.hpp"
#include "hkernel/reachability.hpp"
#include "hkernel/text_format.hpp"
#include "oracle.hpp"

#include <random>
#include <set>

using namespace hkernel;

namespace {

std::shared_ptr<const Pattern> share(Pattern p) { return std::make_shared<const Pattern>(std::move(p)); }

const std::string kDir = HKERNEL_FIXTURES;

}  // namespace

TEST_CASE("walk and path reachability agree with brute force") {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 400; ++i) {
    auto h = share(oracle::random_pattern(1 + i % 4, rng, i % 5 != 0));
    const int n = 2 + i % 6;
    const auto d = oracle::random_digraph(h, n, 0.25, rng, 1 + i % 2);
    const auto wr = oracle::walk_reach(d);
    const auto pr = oracle::path_reach(d);
    const auto rw = reach_digraph(d, Semantics::Walk);
    const auto rp = reach_digraph(d, Semantics::Path);
    for (int u = 0; u < n; ++u)
      for (int v = 0; v < n; ++v) {
        if (u == v) continue;
        CHECK(rw.has_arc(u, v) == wr[u][v]);
        CHECK(rp.has_arc(u, v) == pr[u][v]);
        const auto w = walk_reachable(d, u, v);
        const auto p = path_reachable(d, u, v);
        CHECK(w.has_value() == wr[u][v]);
        CHECK(p.has_value() == pr[u][v]);
        if (w) {
          CHECK(verify_walk(d, *w));
          CHECK(w->vertices.front() == u);
          CHECK(w->vertices.back() == v);
        }
        if (p) {
          CHECK(verify_path(d, *p));
          CHECK(p->vertices.front() == u);
          CHECK(p->vertices.back() == v);
        }
        // Every H-path is an H-walk.
        if (pr[u][v]) CHECK(wr[u][v]);
      }
  }
}

TEST_CASE("walk certificates are shortest") {
  std::mt19937_64 rng(22);
  for (int i = 0; i < 200; ++i) {
    auto h = share(oracle::random_pattern(2 + i % 2, rng));
    const int n = 3 + i % 4;
    const auto d = oracle::random_digraph(h, n, 0.3, rng);
    // Length-bounded brute force: reachable by a walk of exactly L arcs.
    const int k = h->size();
    for (int u = 0; u < n; ++u) {
      std::vector<std::vector<bool>> cur(n, std::vector<bool>(k, false));
      for (const auto& a : d.arcs())
        if (a.tail == u) cur[a.head][a.colour] = true;
      std::vector<int> first(n, -1);
      for (int len = 1; len <= n * k + 1; ++len) {
        for (int v = 0; v < n; ++v)
          for (int c = 0; c < k; ++c)
            if (cur[v][c] && first[v] < 0) first[v] = len;
        std::vector<std::vector<bool>> nx(n, std::vector<bool>(k, false));
        for (const auto& a : d.arcs())
          for (int c = 0; c < k; ++c)
            if (cur[a.tail][c] && h->has_arc(c, a.colour)) nx[a.head][a.colour] = true;
        cur = std::move(nx);
      }
      for (int v = 0; v < n; ++v) {
        if (v == u) continue;
        const auto w = walk_reachable(d, u, v);
        CHECK(w.has_value() == (first[v] > 0));
        if (w) CHECK(w->length() == first[v]);
      }
    }
  }
}

TEST_CASE("closures agree with pairwise queries") {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 100; ++i) {
    auto h = share(oracle::random_pattern(3, rng));
    const auto d = oracle::random_digraph(h, 6, 0.2, rng);
    const auto rp = reach_problem(d);
    const auto wc = walk_closure(rp.problem);
    const auto pc = path_closure(rp.problem, default_path_budget());
    for (int u = 0; u < 6; ++u) {
      CHECK(walk_reach_from(rp.problem, u) == wc[u]);
      CHECK(closure(rp.problem, Semantics::Path, default_path_budget())[u] == pc[u]);
      for (int v = 0; v < 6; ++v) {
        if (u == v) continue;
        CHECK(wc[u].contains(v) == walk_reachable(d, u, v).has_value());
        CHECK(pc[u].contains(v) == path_reachable(d, u, v).has_value());
      }
    }
  }
}

TEST_CASE("fixture separating walks from paths") {
  const auto d = load_digraph(kDir + "/walk_not_path.dg");
  const int v1 = d.index_of("v1");
  const int v2 = d.index_of("v2");
  const auto w = walk_reachable(d, v1, v2);
  REQUIRE(w.has_value());
  CHECK(verify_walk(d, *w));
  CHECK_FALSE(verify_path(d, *w));
  CHECK_FALSE(path_reachable(d, v1, v2).has_value());
  CHECK(render_trail(d, *w).find("v1 >") == 0);
}

TEST_CASE("monochromatic reachability with a loopless pattern") {
  const auto d = load_digraph(kDir + "/mono_c3.dg");
  // Without a loop only single arcs are H-walks.
  CHECK(walk_reachable(d, 0, 1).has_value());
  CHECK_FALSE(walk_reachable(d, 0, 2).has_value());
  CHECK(reach_digraph(d, Semantics::Walk).arc_count() == 3);
}

TEST_CASE("errors") {
  auto h = share(pattern_two_isolated());
  const auto d = new_coloured_digraph({"u", "v"}, {{"u", "v", "a"}}, h);
  auto code = [](const std::function<void()>& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Internal;
  };
  CHECK(code([&] { walk_reachable(d, 0, 0); }) == ErrorCode::SameVertex);
  CHECK(code([&] { path_reachable(d, 1, 1); }) == ErrorCode::SameVertex);
  CHECK(parse_semantics("walk") == Semantics::Walk);
  CHECK(code([] { parse_semantics("trail"); }) == ErrorCode::SyntaxError);
}

TEST_CASE("path budget signals unknown") {
  // s only leads to v0, the only arc into t is v0 -b-> t, and b may only
  // follow c, whose single arc re-enters v0. Walks from s reach t; paths
  // explore the a-coloured complete digraph before failing.
  auto h = share(new_pattern({"a", "b", "c"}, {{"a", "a"}, {"a", "c"}, {"c", "b"}}));
  std::vector<std::tuple<std::string, std::string, std::string>> arcs;
  for (int u = 0; u < 9; ++u)
    for (int v = 0; v < 9; ++v)
      if (u != v) arcs.emplace_back("v" + std::to_string(u), "v" + std::to_string(v), "a");
  arcs.emplace_back("v1", "v0", "c");
  arcs.emplace_back("v0", "t", "b");
  arcs.emplace_back("s", "v0", "a");
  auto names = oracle::names(9);
  names.push_back("t");
  names.push_back("s");
  const auto d = new_coloured_digraph(names, arcs, h);
  CHECK(walk_reachable(d, 10, 9).has_value());
  CHECK_THROWS_AS(path_reachable(d, 10, 9, 100), BudgetExceeded);
  CHECK_FALSE(path_reachable(d, 10, 9, 100000000).has_value());
  CHECK_FALSE(oracle::path_reach(d)[10][9]);
}

TEST_CASE("walks shortcut to paths under transitive patterns") {
  std::mt19937_64 rng(24);
  int checked = 0;
  for (int i = 0; i < 400; ++i) {
    auto h = share(oracle::random_pattern(3, rng));
    if (!is_transitive(*h)) continue;
    const auto d = oracle::random_digraph(h, 6, 0.25, rng);
    for (int u = 0; u < 6; ++u)
      for (int v = 0; v < 6; ++v) {
        if (u == v) continue;
        const auto w = walk_reachable(d, u, v);
        if (!w) continue;
        const auto p = extract_path_from_walk(d, *w);
        CHECK(verify_path(d, p));
        CHECK(p.vertices.front() == u);
        CHECK(p.vertices.back() == v);
        ++checked;
      }
  }
  CHECK(checked > 100);
  const auto d = load_digraph(kDir + "/walk_not_path.dg");
  const auto w = walk_reachable(d, 1, 2);
  try {
    extract_path_from_walk(d, *w);
    FAIL("accepted a non-transitive pattern");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotTransitive);
  }
}
