#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "hkernel/constructions.hpp"
#include "hkernel/enumerate.hpp"
#include "hkernel/error.hpp"
#include "hkernel/kernels.hpp"
#include "hkernel/pattern_class.hpp"
#include "hkernel/text_format.hpp"
#include "oracle.hpp"

#include <random>

using namespace hkernel;

namespace {

std::shared_ptr<const Pattern> share(Pattern p) { return std::make_shared<const Pattern>(std::move(p)); }

const std::string kDir = HKERNEL_FIXTURES;

bool path_kernel_no_walk_kernel(const ColouredMultidigraph& d) {
  return !oracle::kernels(d, Semantics::Path).empty() && oracle::kernels(d, Semantics::Walk).empty();
}
bool walk_kernel_no_path_kernel(const ColouredMultidigraph& d) {
  return !oracle::kernels(d, Semantics::Walk).empty() && oracle::kernels(d, Semantics::Path).empty();
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Internal;
}

}  // namespace

TEST_CASE("linear sum of fixtures") {
  const auto l = load_digraph(kDir + "/sum_left.dg");
  const auto r = load_digraph(kDir + "/sum_right.dg");
  const auto s = linear_sum_digraphs(l, r);
  CHECK(s.digraph.vertex_count() == 5);
  CHECK(s.digraph.arc_count() == l.arc_count() + r.arc_count() + 6);
  CHECK(s.digraph.pattern().size() == 3);
  const int c0 = s.digraph.pattern().size() - 1;
  CHECK(s.digraph.pattern().out_row(c0) == (1U << c0));
  const auto named = linear_sum_digraphs(l, r, std::string("a"));
  CHECK(named.digraph.pattern().size() == 2);
  // Kernels of the sum live in the right operand.
  const auto k = find_kernel(s.digraph, Semantics::Path);
  REQUIRE(k.witness);
  const auto back = kernel_pullback(s.digraph.set_to_names(*k.witness), s.map);
  CHECK(is_kernel(r, r.names_to_set(back), Semantics::Path));
}

TEST_CASE("linear sum renames clashing vertices") {
  auto h = share(pattern_two_isolated());
  const auto d = new_coloured_digraph({"u", "v"}, {{"u", "v", "a"}}, h);
  const auto s = linear_sum_digraphs(d, d);
  CHECK(s.digraph.vertices() == std::vector<std::string>{"u", "v", "u'", "v'"});
  CHECK(kernel_pullback({"v'"}, s.map) == std::vector<std::string>{"v"});
  const auto other = new_coloured_digraph({"u"}, {}, share(pattern_f1()));
  CHECK(code_of([&] { linear_sum_digraphs(d, other); }) == ErrorCode::PatternMismatch);
}

TEST_CASE("linear sums preserve both separation properties") {
  std::mt19937_64 rng(51);
  int seen_pnw = 0, seen_wnp = 0;
  const auto pnw = load_digraph(kDir + "/path_not_walk.dg");
  const auto wnp = load_digraph(kDir + "/walk_not_path.dg");
  for (int i = 0; i < 400; ++i) {
    const auto& base = (i % 4 == 0) ? pnw : (i % 4 == 1) ? wnp : pnw;
    auto h = base.pattern_ptr();
    const auto d1 = oracle::random_digraph(h, 1 + i % 3, 0.3, rng);
    const auto d2 = (i % 4 < 2) ? base : oracle::random_digraph(h, 2 + i % 4, 0.3, rng);
    const auto s = linear_sum_digraphs(d1, d2).digraph;
    const bool a = path_kernel_no_walk_kernel(s), b = path_kernel_no_walk_kernel(d2);
    const bool c = walk_kernel_no_path_kernel(s), e = walk_kernel_no_path_kernel(d2);
    CHECK(a == b);
    CHECK(c == e);
    seen_pnw += b;
    seen_wnp += e;
  }
  CHECK(seen_pnw > 0);
  CHECK(seen_wnp > 0);
}

TEST_CASE("recursive families") {
  const auto pnw = load_digraph(kDir + "/path_not_walk.dg");
  const auto wnp = load_digraph(kDir + "/walk_not_path.dg");
  for (int j = 1; j <= 4; ++j) {
    const auto d = linear_sum_family(pnw, j);
    const auto e = linear_sum_family(wnp, j);
    CHECK(d.vertex_count() == pnw.vertex_count() + j - 1);
    CHECK(e.vertex_count() == wnp.vertex_count() + j - 1);
    CHECK(path_kernel_no_walk_kernel(d));
    CHECK(walk_kernel_no_path_kernel(e));
    CHECK(find_kernel(d, Semantics::Path).status == KernelStatus::Found);
    CHECK(find_kernel(d, Semantics::Walk).status == KernelStatus::NoneExists);
    CHECK(find_kernel(e, Semantics::Walk).status == KernelStatus::Found);
    CHECK(find_kernel(e, Semantics::Path).status == KernelStatus::NoneExists);
    // One cross colour shared by every level.
    CHECK(d.pattern().size() == pnw.pattern().size() + (j > 1 ? 1 : 0));
  }
  CHECK(code_of([&] { linear_sum_family(pnw, 0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("pattern linear sum") {
  const Pattern s = linear_sum_patterns(new_pattern({"a"}, {{"a", "a"}}),
                                        new_pattern({"b", "c"}, {{"b", "b"}, {"c", "c"}}));
  CHECK(s.arc_count() == 5);
  CHECK(s.has_arc(0, 1));
  CHECK(s.has_arc(0, 2));
  CHECK_FALSE(s.has_arc(1, 0));
  CHECK(code_of([] { linear_sum_patterns(new_pattern({"a"}, {}), new_pattern({"a"}, {})); }) ==
        ErrorCode::DuplicateColour);
}

TEST_CASE("odd cycle witnesses admit no independent H-absorbent set") {
  std::mt19937_64 rng(52);
  int built = 0;
  for (int i = 0; i < 600; ++i) {
    const Pattern p = oracle::random_pattern(3 + i % 3, rng);
    const auto cyc = odd_cycle_in_complement(p);
    if (!cyc) continue;
    std::vector<std::string> names;
    for (int c : *cyc) names.push_back(p.name(c));
    if (names.size() < 3) continue;  // a missing loop is not a cycle of length >= 3
    const auto d = odd_cycle_witness(p, names);
    CHECK(d.vertex_count() == static_cast<int>(names.size()));
    CHECK_FALSE(oracle::has_independent_h_absorbent(d));
    CHECK(find_independent_H_absorbent(d).status == KernelStatus::NoneExists);
    ++built;
  }
  CHECK(built > 20);
  const Pattern k3 = complete_reflexive({"a", "b", "c"});
  CHECK(code_of([&] { odd_cycle_witness(k3, {"a", "b"}); }) == ErrorCode::NotOddCycle);
  CHECK(code_of([&] { odd_cycle_witness(k3, {"a", "b", "c"}); }) == ErrorCode::NotInComplement);
}

TEST_CASE("obstruction construction has no path-kernel") {
  int built = 0;
  for (const auto& p : enumerate_patterns(3)) {
    const auto w = find_obstruction(p);
    if (!w) continue;
    const auto d = obstruction_digraph(p, *w);
    const int k = static_cast<int>(w->walk.size()) - 1;
    CHECK(d.vertex_count() == 3 * (2 * k + 1));
    CHECK(oracle::kernels(d, Semantics::Path).empty());
    CHECK(find_kernel(d, Semantics::Path).status == KernelStatus::NoneExists);
    ++built;
  }
  CHECK(built >= 4);
  std::mt19937_64 rng(55);
  for (int i = 0; i < 200; ++i) {
    const Pattern p = oracle::random_pattern(4, rng);
    const auto w = find_obstruction(p);
    if (!w) continue;
    const auto d = obstruction_digraph(p, *w);
    if (d.vertex_count() <= 15) CHECK(oracle::kernels(d, Semantics::Path).empty());
  }
  ObstructionWitness bad;
  bad.walk = {0, 0};
  bad.blockers = {1};
  bad.closing = {0, 0};
  CHECK(code_of([&] { obstruction_digraph(complete_reflexive({"a", "b"}), bad); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("twin gadgets pull kernels back") {
  std::mt19937_64 rng(53);
  for (bool f4 : {true, false}) {
    const auto pats = f4 ? f4_gadget_patterns() : f5_gadget_patterns();
    CHECK(pats.original->arc_count() == pats.derived->arc_count() + 1);
    CHECK(isomorphic(contract_true_twins(*pats.derived, "z", "w"), f4 ? pattern_f4() : pattern_f5()));
    int pulled = 0;
    for (int i = 0; i < 300; ++i) {
      const auto d = oracle::random_digraph(pats.original, 2 + i % 5, 0.2, rng);
      const auto g = f4 ? gadget_f4(d) : gadget_f5(d);
      CHECK(g.map.original_vertices == d.vertices());
      CHECK(g.digraph.vertex_count() == d.vertex_count() + static_cast<int>(g.map.hats.size()));
      CHECK(parse_gadget_map(serialize_gadget_map(g.map)) == g.map);
      const auto k = find_kernel(g.digraph, Semantics::Path);
      if (!k.witness) continue;
      const auto back = kernel_pullback(g.digraph.set_to_names(*k.witness), g.map);
      CHECK(is_kernel(d, d.names_to_set(back), Semantics::Path));
      ++pulled;
    }
    CHECK(pulled > 50);
  }
  const auto in = load_digraph(kDir + "/gadget_f4_input.dg", f4_gadget_patterns().original);
  const auto g = gadget_f4(in);
  CHECK(g.map.hats.size() == 1);
  CHECK(g.map.hats[0].first == "s");
  CHECK(g.digraph.arc_count() == in.arc_count() + 4);
  CHECK(gadget_f5(in).digraph.arc_count() == in.arc_count() + 3);
  const auto bad = new_coloured_digraph({"u", "v"}, {{"u", "v", "q"}}, share(new_pattern({"q"}, {})));
  CHECK(code_of([&] { gadget_f4(bad); }) == ErrorCode::UnknownColour);
}

TEST_CASE("f1_simplify preserves path reachability and kernels") {
  std::mt19937_64 rng(54);
  auto f1 = share(pattern_f1());
  for (int i = 0; i < 600; ++i) {
    const int n = 2 + i % 5;
    const auto d = oracle::random_digraph(f1, n, 0.2, rng, 2);
    const auto g = f1_simplify(d);
    const auto& s = g.digraph;
    // No parallel arcs remain.
    for (int u = 0; u < s.vertex_count(); ++u)
      for (int v = 0; v < s.vertex_count(); ++v)
        CHECK(std::popcount(s.pair_colours(u, v)) <= 1);
    int extra = 0;
    for (int u = 0; u < n; ++u)
      for (int v = 0; v < n; ++v)
        if (u != v && d.pair_colours(u, v) == 6U) extra += 2;  // exactly {g, b}
    CHECK(s.vertex_count() == n + extra);
    CHECK(g.map.z1.size() == g.map.z2.size());
    const auto rd = oracle::path_reach(d);
    const auto rs = oracle::path_reach(s);
    for (int u = 0; u < n; ++u)
      for (int v = 0; v < n; ++v) CHECK(rd[u][v] == rs[u][v]);
    const auto kd = find_kernel(d, Semantics::Path);
    const auto ks = find_kernel(s, Semantics::Path);
    CHECK(kd.status == ks.status);
    if (ks.witness) {
      const auto back = kernel_pullback(s.set_to_names(*ks.witness), g.map);
      CHECK(is_kernel(d, d.names_to_set(back), Semantics::Path));
    }
  }
  const auto fx = load_digraph(kDir + "/f1_parallel.dg");
  CHECK(f1_simplify(fx).digraph.vertex_count() == fx.vertex_count() + 2);
}

TEST_CASE("gadget map text round trip") {
  GadgetMap m;
  m.kind = GadgetKind::F1Simplify;
  m.original_vertices = {"u", "v"};
  m.derived_vertices = {"u", "v", "z1", "z2"};
  m.z1 = {"z1"};
  m.z2 = {"z2"};
  CHECK(parse_gadget_map(serialize_gadget_map(m)) == m);
  CHECK(kernel_pullback({"u", "z2"}, m) == std::vector<std::string>{"u"});
}
