#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "hkernel/enumerate.hpp"
#include "hkernel/error.hpp"
#include "hkernel/pattern_class.hpp"
#include "oracle.hpp"

#include <chrono>
#include <map>
#include <random>
#include <set>

using namespace hkernel;

namespace {

// Pattern built from adjacency rows over colours a, b, c, ...
Pattern rows_pattern(std::vector<std::uint32_t> rows) {
  std::vector<std::string> cs;
  for (std::size_t i = 0; i < rows.size(); ++i) cs.push_back(std::string(1, static_cast<char>('a' + i)));
  return Pattern::from_rows(cs, rows);
}

// Disjoint union and join (every colour of the left dominates the right).
Pattern sum(const Pattern& l, const Pattern& r, bool join) {
  const int a = l.size(), b = r.size();
  std::vector<std::uint32_t> rows(a + b, 0);
  for (int i = 0; i < a; ++i) rows[i] = l.out_row(i) | (join ? (((1U << b) - 1) << a) : 0U);
  for (int i = 0; i < b; ++i) rows[a + i] = r.out_row(i) << a;
  return rows_pattern(rows);
}
Pattern k(int n) {
  std::vector<std::uint32_t> rows(n, (1U << n) - 1);
  return rows_pattern(rows);
}
Pattern e(int n) {
  std::vector<std::uint32_t> rows(n);
  for (int i = 0; i < n; ++i) rows[i] = 1U << i;
  return rows_pattern(rows);
}

bool brute_transitive(const Pattern& p) {
  for (int a = 0; a < p.size(); ++a)
    for (int b = 0; b < p.size(); ++b)
      for (int c = 0; c < p.size(); ++c)
        if (p.has_arc(a, b) && p.has_arc(b, c) && !p.has_arc(a, c)) return false;
  return true;
}

bool brute_odd_cycle_in_complement(const Pattern& p) {
  // An odd closed walk contains an odd cycle; search closed walks of odd length <= k.
  const Pattern c = complement(p);
  const int n = c.size();
  for (int s = 0; s < n; ++s) {
    std::uint32_t cur = 1U << s;
    for (int len = 1; len <= n; ++len) {
      std::uint32_t nx = 0;
      for (int v = 0; v < n; ++v)
        if ((cur >> v) & 1U) nx |= c.out_row(v);
      cur = nx;
      if (len % 2 == 1 && ((cur >> s) & 1U)) return true;
    }
  }
  return false;
}

bool brute_obstruction(const Pattern& p) {
  const int n = p.size();
  const std::uint32_t full = (1U << n) - 1;
  for (int x0 = 0; x0 < n; ++x0) {
    // Vertices ending a walk from x0 whose inner vertices all miss an out-arc.
    std::uint32_t ends = 1U << x0;
    std::uint32_t frontier = (p.out_row(x0) != full) ? 1U << x0 : 0U;
    std::uint32_t expanded = 0;
    while (frontier) {
      const int v = std::countr_zero(frontier);
      frontier &= frontier - 1;
      if ((expanded >> v) & 1U) continue;
      expanded |= 1U << v;
      ends |= p.out_row(v);
      for (std::uint32_t w = p.out_row(v); w; w &= w - 1) {
        const int y = std::countr_zero(w);
        if (p.out_row(y) != full && !((expanded >> y) & 1U)) frontier |= 1U << y;
      }
    }
    for (int xk = 0; xk < n; ++xk)
      if (((ends >> xk) & 1U) && !p.has_arc(xk, x0)) return true;
  }
  return false;
}

bool brute_structural(const Pattern& p, bool f1_flag) {
  if (!is_reflexive(p)) return false;
  const int n = p.size();
  for (std::uint32_t v1 = 1; v1 < (1U << n); ++v1) {
    const std::uint32_t v2 = ((1U << n) - 1) & ~v1;
    bool complete = true, none = true, forward = true, back_none = true;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        const bool ia = (v1 >> a) & 1U, ib = (v1 >> b) & 1U;
        if (ia == ib && !p.has_arc(a, b)) complete = false;
        if (ia != ib && p.has_arc(a, b)) none = false;
        if (ia && !ib && !p.has_arc(a, b)) forward = false;
        if (!ia && ib && p.has_arc(a, b)) back_none = false;
      }
    (void)v2;
    if (!complete) continue;
    if (none || (forward && back_none) || (forward && f1_flag)) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("transitivity and the minimal non-transitive family") {
  const auto fam = minimal_nontransitive_family();
  CHECK(fam.size() == 7);
  for (const auto& q : fam) {
    CHECK(q.size() == 3);
    CHECK(is_reflexive(q));
    CHECK_FALSE(is_transitive(q));
    for (std::uint32_t m : {3U, 5U, 6U}) CHECK(is_transitive(induced_subpattern(q, m)));
  }
  std::mt19937_64 rng(41);
  for (int i = 0; i < 2000; ++i) {
    const Pattern p = oracle::random_pattern(1 + i % 6, rng, i % 7 != 0);
    CHECK(is_transitive(p) == brute_transitive(p));
    if (is_reflexive(p)) CHECK(is_transitive(p) == is_free_of(p, fam));
  }
}

TEST_CASE("induced containment") {
  const Pattern f1 = pattern_f1();
  CHECK(contains_induced(f1, f1));
  CHECK(contains_induced(k(4), k(2)));
  CHECK_FALSE(contains_induced(k(4), e(2)));
  CHECK(contains_induced(sum(k(2), e(2), false), e(3)));
  CHECK_FALSE(contains_induced(e(2), e(3)));
}

TEST_CASE("odd cycles in the complement") {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 2000; ++i) {
    const Pattern p = oracle::random_pattern(1 + i % 6, rng);
    const auto cyc = odd_cycle_in_complement(p);
    CHECK(cyc.has_value() == brute_odd_cycle_in_complement(p));
    CHECK(in_B2(p) == !cyc.has_value());
    if (cyc) {
      CHECK(cyc->size() % 2 == 1);
      const Pattern c = complement(p);
      for (std::size_t j = 0; j < cyc->size(); ++j)
        CHECK(c.has_arc((*cyc)[j], (*cyc)[(j + 1) % cyc->size()]));
      const auto a = analyse_b2(p);
      CHECK(a.reason == B2Reason::OddCycle);
      CHECK(a.odd_cycle == *cyc);
    }
  }
  const Pattern loopless = new_pattern({"a"}, {});
  CHECK_FALSE(in_B2(loopless));
  CHECK(analyse_b2(loopless).reason == B2Reason::NotReflexive);
}

TEST_CASE("true twins, contraction and blow-up") {
  std::mt19937_64 rng(43);
  for (int i = 0; i < 500; ++i) {
    const Pattern p = oracle::random_pattern(1 + i % 4, rng);
    const int n = p.size();
    std::set<std::pair<int, int>> brute;
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        if (p.out_row(a) == p.out_row(b) && p.in_row(a) == p.in_row(b)) brute.insert({a, b});
    const auto tw = true_twins(p);
    CHECK(std::set<std::pair<int, int>>(tw.begin(), tw.end()) == brute);

    const std::string v = p.name(i % n);
    const int copies = 2 + i % 3;
    const Pattern big = blow_up(p, v, copies);
    CHECK(big.size() == n + copies - 1);
    CHECK(is_reflexive(big));
    CHECK(true_twins(big).size() >= static_cast<std::size_t>(copies * (copies - 1) / 2));
    CHECK(in_B2(big) == in_B2(p));
    CHECK(is_transitive(big) == is_transitive(p));
    Pattern back = big;
    for (int c = 2; c <= copies; ++c)
      back = contract_true_twins(back, v + "_1", v + "_" + std::to_string(c));
    CHECK(isomorphic(back, p));
  }
  CHECK(blow_up(pattern_f1(), "r", 1) == pattern_f1());
  try {
    contract_true_twins(pattern_f1(), "r", "g");
    FAIL("contracted non-twins");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::NotTwins);
  }
  try {
    true_twins(new_pattern({"a"}, {}));
    FAIL("accepted a non-reflexive pattern");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::NotReflexive);
  }
}

TEST_CASE("obstruction walks") {
  std::mt19937_64 rng(44);
  for (int i = 0; i < 2000; ++i) {
    const Pattern p = oracle::random_pattern(1 + i % 5, rng, i % 9 != 0);
    const auto w = find_obstruction(p);
    CHECK(w.has_value() == brute_obstruction(p));
    if (w) CHECK(verify_obstruction(p, *w));
  }
  // Complete patterns have no colour with a missing out-arc.
  CHECK_FALSE(find_obstruction(k(3)).has_value());
  ObstructionWitness bogus;
  bogus.walk = {0};
  bogus.closing = {0, 0};
  CHECK_FALSE(verify_obstruction(k(2), bogus));
}

TEST_CASE("three-vertex catalogue") {
  const auto t0 = std::chrono::steady_clock::now();
  const auto cat = three_vertex_catalogue();
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(secs < 1.0);
  REQUIRE(cat.size() == 16);

  const std::map<std::string, Pattern> yes = {
      {"K3", k(3)},
      {"K1*K2", sum(k(1), k(2), true)},
      {"K2*K1", sum(k(2), k(1), true)},
      {"K2+K1", sum(k(2), k(1), false)}};
  const std::map<std::string, Pattern> no = {
      {"2K1*K1", sum(e(2), k(1), true)},
      {"T3", sum(k(1), sum(k(1), k(1), true), true)},
      {"(K1*K1)+K1", sum(sum(k(1), k(1), true), k(1), false)},
      {"K1*2K1", sum(k(1), e(2), true)},
      {"3K1", e(3)}};

  int transitive = 0, pan_yes = 0, pan_no = 0, obstructions = 0;
  for (const auto& entry : cat) {
    REQUIRE(entry.names.size() == 1);
    const std::string& name = entry.names[0];
    CHECK(entry.code == canonical_code(entry.pattern));
    CHECK(entry.transitive == is_transitive(entry.pattern));
    CHECK(entry.in_b2 == in_B2(entry.pattern));
    CHECK(entry.obstruction.has_value() == find_obstruction(entry.pattern).has_value());
    if (entry.transitive) {
      ++transitive;
      if (entry.panchromatic_by_paths == Panchromatic::Yes) {
        ++pan_yes;
        REQUIRE(yes.count(name) == 1);
        CHECK(isomorphic(yes.at(name), entry.pattern));
      } else {
        ++pan_no;
        CHECK(entry.panchromatic_by_paths == Panchromatic::No);
        REQUIRE(no.count(name) == 1);
        CHECK(isomorphic(no.at(name), entry.pattern));
      }
    } else {
      if (name == "F1") {
        CHECK(entry.panchromatic_by_paths == Panchromatic::OpenF1);
      } else {
        CHECK(entry.panchromatic_by_paths == Panchromatic::No);
      }
      if (name.rfind("obstruction-", 0) == 0) {
        ++obstructions;
        CHECK(entry.obstruction.has_value());
      }
    }
  }
  CHECK(transitive == 9);
  CHECK(pan_yes == 4);
  CHECK(pan_no == 5);
  CHECK(obstructions == 4);
  // F1, F4, F5 are the non-transitive entries without an obstruction walk.
  for (const auto& entry : cat)
    if (!entry.transitive && !entry.obstruction)
      CHECK((entry.names[0] == "F1" || entry.names[0] == "F4" || entry.names[0] == "F5"));
  CHECK(catalogue_table(cat).find("F1") != std::string::npos);
}

TEST_CASE("named patterns") {
  const Pattern f1 = pattern_f1();
  CHECK(f1.colours() == std::vector<std::string>{"r", "g", "b"});
  CHECK(f1.arc_count() == 8);
  CHECK_FALSE(f1.has_arc(f1.index_of("b"), f1.index_of("g")));
  CHECK(in_B2(f1));
  CHECK(pattern_f4().arc_count() == 6);
  CHECK(pattern_f5().arc_count() == 7);
  CHECK(pattern_two_isolated().arc_count() == 2);
  const Pattern h2 = pattern_b2_not_b3();
  CHECK(h2.size() == 4);
  CHECK(in_B2(h2));
  CHECK_FALSE(structural_panchromatic(h2, false).yes);
  CHECK_FALSE(structural_panchromatic(h2, true).yes);
}

TEST_CASE("structural verdict agrees with partition brute force") {
  std::mt19937_64 rng(45);
  for (int i = 0; i < 2000; ++i) {
    const Pattern p = oracle::random_pattern(1 + i % 5, rng, i % 11 != 0);
    for (bool flag : {false, true}) {
      const auto v = structural_panchromatic(p, flag);
      CHECK(v.yes == brute_structural(p, flag));
      CHECK(v.not_reflexive == !is_reflexive(p));
      if (v.yes) {
        CHECK((v.part1 | v.part2) == p.all_colours());
        CHECK((v.part1 & v.part2) == 0U);
        CHECK(v.arrangement >= 1);
        CHECK(v.arrangement <= (flag ? 3 : 2));
      }
    }
  }
  // On three colours the verdict matches the catalogue.
  for (const auto& entry : three_vertex_catalogue()) {
    const bool pan = entry.panchromatic_by_paths == Panchromatic::Yes;
    CHECK(structural_panchromatic(entry.pattern, false).yes == pan);
    CHECK(structural_panchromatic(entry.pattern, true).yes == (pan || entry.names[0] == "F1"));
  }
  const auto kv = structural_panchromatic(k(3), false);
  CHECK(kv.arrangement == 1);
  CHECK(kv.part1 == 7U);
}
