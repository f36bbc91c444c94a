#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "hkernel/error.hpp"
#include "hkernel/kernels.hpp"
#include "hkernel/pattern_class.hpp"
#include "hkernel/text_format.hpp"
#include "oracle.hpp"

#include <algorithm>
#include <random>

using namespace hkernel;

namespace {

std::shared_ptr<const Pattern> share(Pattern p) { return std::make_shared<const Pattern>(std::move(p)); }

const std::string kDir = HKERNEL_FIXTURES;

// Least solution in the documented order: lexicographically greatest
// characteristic vector read from vertex 0.
std::uint64_t least_in_order(std::vector<std::uint64_t> masks, int n) {
  auto key = [n](std::uint64_t m) {
    std::uint64_t r = 0;
    for (int v = 0; v < n; ++v) r = (r << 1) | ((m >> v) & 1U);
    return r;
  };
  return *std::max_element(masks.begin(), masks.end(),
                           [&](std::uint64_t a, std::uint64_t b) { return key(a) < key(b); });
}

}  // namespace

TEST_CASE("find_kernel agrees with subset enumeration") {
  std::mt19937_64 rng(31);
  int found = 0, none = 0;
  for (int i = 0; i < 600; ++i) {
    auto h = share(oracle::random_pattern(1 + i % 3, rng, i % 4 != 0));
    const int n = 1 + i % 7;
    const auto d = oracle::random_digraph(h, n, 0.3, rng);
    for (Semantics s : {Semantics::Walk, Semantics::Path}) {
      const auto all = oracle::kernels(d, s);
      const auto rep = find_kernel(d, s);
      REQUIRE(rep.status != KernelStatus::Unknown);
      CHECK((rep.status == KernelStatus::Found) == !all.empty());
      if (rep.witness) {
        CHECK(is_kernel(d, *rep.witness, s));
        CHECK(rep.witness->bits() == least_in_order(all, n));
        ++found;
      } else {
        ++none;
      }
    }
  }
  CHECK(found > 0);
  CHECK(none > 0);
}

TEST_CASE("independent absorbent enumeration lists every solution in order") {
  std::mt19937_64 rng(32);
  for (int i = 0; i < 200; ++i) {
    const int n = 1 + i % 8;
    std::bernoulli_distribution coin(0.3);
    std::vector<VertexSet> rel(n), absorb(n);
    std::vector<std::vector<bool>> r(n, std::vector<bool>(n)), a(n, std::vector<bool>(n));
    for (int u = 0; u < n; ++u)
      for (int v = 0; v < n; ++v) {
        if (u == v) continue;
        if (coin(rng)) rel[u].insert(v), r[u][v] = true;
        if (coin(rng)) absorb[u].insert(v), a[u][v] = true;
      }
    const auto conflict = symmetric_conflict(rel);
    AbsorbentProblem p{n, conflict, absorb};
    std::vector<std::uint64_t> got;
    for_each_independent_absorbent(p, [&](VertexSet s) {
      got.push_back(s.bits());
      return true;
    });
    std::vector<std::uint64_t> expected;
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m)
      if (oracle::is_solution(r, a, m)) expected.push_back(m);
    auto sorted = got;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == expected);
    const auto least = least_independent_absorbent(p);
    CHECK(least.has_value() == !expected.empty());
    if (least) {
      CHECK(least->bits() == least_in_order(expected, n));
      CHECK(got.front() == least->bits());
    }
  }
}

TEST_CASE("plain digraph kernels") {
  // Directed odd cycle: no kernel. Even cycle: alternate vertices.
  ReachDigraph c3{{"a", "b", "c"}, {VertexSet::of({1}), VertexSet::of({2}), VertexSet::of({0})},
                  Semantics::Walk};
  CHECK_FALSE(kernel_of_plain_digraph(c3).has_value());
  ReachDigraph c4{{"a", "b", "c", "d"},
                  {VertexSet::of({1}), VertexSet::of({2}), VertexSet::of({3}), VertexSet::of({0})},
                  Semantics::Walk};
  CHECK(kernel_of_plain_digraph(c4) == VertexSet::of({0, 2}));
}

TEST_CASE("fixture kernels") {
  const auto mono = load_digraph(kDir + "/mono_c3.dg");
  const auto rep = find_kernel(mono, Semantics::Path);
  CHECK(rep.status == KernelStatus::NoneExists);
  CHECK(rep.describe(mono).find("none") != std::string::npos);

  const auto two = load_digraph(kDir + "/two_colour.dg");
  const auto k = find_kernel(two, Semantics::Path);
  REQUIRE(k.witness.has_value());
  CHECK(two.set_to_names(*k.witness) == std::vector<std::string>{"p", "t"});

  const auto wnp = load_digraph(kDir + "/walk_not_path.dg");
  CHECK(wnp.set_to_names(*find_kernel(wnp, Semantics::Walk).witness) ==
        std::vector<std::string>{"v2"});
  CHECK(find_kernel(wnp, Semantics::Path).status == KernelStatus::NoneExists);

  const auto pnw = load_digraph(kDir + "/path_not_walk.dg");
  CHECK(pnw.set_to_names(*find_kernel(pnw, Semantics::Path).witness) ==
        std::vector<std::string>{"v1", "v2"});
  CHECK(find_kernel(pnw, Semantics::Walk).status == KernelStatus::NoneExists);
  CHECK(oracle::kernels(pnw, Semantics::Walk).empty());
}

TEST_CASE("independent H-absorbent sets agree with brute force") {
  std::mt19937_64 rng(33);
  for (int i = 0; i < 300; ++i) {
    auto h = share(oracle::random_pattern(1 + i % 3, rng));
    const auto d = oracle::random_digraph(h, 1 + i % 7, 0.3, rng);
    const auto rep = find_independent_H_absorbent(d);
    CHECK((rep.status == KernelStatus::Found) == oracle::has_independent_h_absorbent(d));
    if (rep.witness) CHECK(is_independent_H_absorbent(d, *rep.witness));
  }
}

TEST_CASE("constructive set for odd-cycle-free complements") {
  std::mt19937_64 rng(34);
  int built = 0;
  for (int i = 0; i < 400; ++i) {
    auto h = share(oracle::random_pattern(2 + i % 3, rng));
    if (!in_B2(*h)) continue;
    const auto d = oracle::random_digraph(h, 2 + i % 7, 0.3, rng, 1 + i % 2);
    const VertexSet s = constructive_b2_set(d);
    CHECK(is_independent_H_absorbent(d, s));
    ++built;
  }
  CHECK(built > 50);
  const auto wnp = load_digraph(kDir + "/walk_not_path.dg");
  try {
    constructive_b2_set(wnp);
    FAIL("accepted a pattern with an odd complement cycle");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OddCycleInComplement);
  }
}

TEST_CASE("two isolated reflexive colours always give kernels") {
  std::mt19937_64 rng(35);
  auto h = share(pattern_two_isolated());
  for (int i = 0; i < 300; ++i) {
    const auto d = oracle::random_digraph(h, 1 + i % 7, 0.35, rng);
    CHECK(find_kernel(d, Semantics::Walk).status == KernelStatus::Found);
    CHECK(find_kernel(d, Semantics::Path).status == KernelStatus::Found);
  }
}

TEST_CASE("strong components come in topological order") {
  std::mt19937_64 rng(36);
  for (int i = 0; i < 200; ++i) {
    const int n = 1 + i % 9;
    std::bernoulli_distribution coin(0.2);
    std::vector<VertexSet> out(n);
    for (int u = 0; u < n; ++u)
      for (int v = 0; v < n; ++v)
        if (u != v && coin(rng)) out[u].insert(v);
    // Transitive closure as the oracle.
    std::vector<VertexSet> reach = out;
    for (int k = 0; k < n; ++k)
      for (int u = 0; u < n; ++u)
        if (reach[u].contains(k)) reach[u] = reach[u] | reach[k];
    const auto comps = strong_components(out);
    std::vector<int> index(n, -1);
    int total = 0;
    for (std::size_t c = 0; c < comps.size(); ++c)
      for (int v : comps[c]) index[v] = static_cast<int>(c), ++total;
    CHECK(total == n);
    for (int u = 0; u < n; ++u)
      for (int v = 0; v < n; ++v) {
        if (u == v) continue;
        const bool same = reach[u].contains(v) && reach[v].contains(u);
        CHECK((index[u] == index[v]) == same);
        // Arcs never go from a later component back to an earlier one.
        if (out[u].contains(v)) CHECK(index[u] <= index[v]);
      }
  }
}
