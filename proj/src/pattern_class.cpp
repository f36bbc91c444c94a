#include "hkernel/pattern_class.hpp"

#include "hkernel/enumerate.hpp"
#include "hkernel/error.hpp"

#include <bit>
#include <map>

namespace hkernel {

namespace {

bool complete_reflexive_on(const Pattern& p, std::uint32_t mask) {
  for (int a = 0; a < p.size(); ++a) {
    if ((mask >> a) & 1U) {
      if ((p.out_row(a) & mask) != mask) return false;
    }
  }
  return true;
}

bool embed(const Pattern& p, const Pattern& q, std::vector<int>& map, std::uint32_t used) {
  const int k = static_cast<int>(map.size());
  if (k == q.size()) return true;
  for (int x = 0; x < p.size(); ++x) {
    if ((used >> x) & 1U) continue;
    bool ok = p.has_arc(x, x) == q.has_arc(k, k);
    for (int j = 0; j < k && ok; ++j) {
      ok = p.has_arc(map[j], x) == q.has_arc(j, k) && p.has_arc(x, map[j]) == q.has_arc(k, j);
    }
    if (!ok) continue;
    map.push_back(x);
    if (embed(p, q, map, used | (1U << x))) return true;
    map.pop_back();
  }
  return false;
}

Pattern named_three(std::vector<std::pair<std::string, std::string>> cross) {
  std::vector<std::pair<std::string, std::string>> arcs = {{"a", "a"}, {"b", "b"}, {"c", "c"}};
  arcs.insert(arcs.end(), cross.begin(), cross.end());
  return Pattern({"a", "b", "c"}, arcs);
}

}  // namespace

bool is_transitive(const Pattern& p) {
  for (int a = 0; a < p.size(); ++a) {
    std::uint32_t two_steps = 0;
    for (std::uint32_t row = p.out_row(a); row; row &= row - 1) two_steps |= p.out_row(std::countr_zero(row));
    if ((two_steps & ~p.out_row(a)) != 0) return false;
  }
  return true;
}

std::vector<Pattern> minimal_nontransitive_family() {
  std::vector<Pattern> out;
  for (auto& p : enumerate_patterns_exact(3)) {
    if (is_transitive(p)) continue;
    bool minimal = true;
    for (std::uint32_t mask = 1; mask < 7 && minimal; ++mask) {
      if (!is_transitive(induced_subpattern(p, mask))) minimal = false;
    }
    if (minimal) out.push_back(std::move(p));
  }
  return out;
}

bool contains_induced(const Pattern& p, const Pattern& q) {
  if (q.size() > p.size()) return false;
  std::vector<int> map;
  return embed(p, q, map, 0);
}

bool is_free_of(const Pattern& p, const std::vector<Pattern>& family) {
  for (const auto& q : family) {
    if (contains_induced(p, q)) return false;
  }
  return true;
}

std::optional<std::vector<int>> odd_cycle_in_complement(const Pattern& p) {
  const Pattern c = complement(p);
  const int n = c.size();
  std::optional<std::vector<int>> best;
  // Shortest odd closed walk through s via BFS on (colour, parity); the
  // overall shortest odd closed walk is a simple cycle.
  for (int s = 0; s < n; ++s) {
    std::vector<int> parent(2 * n, -2);
    std::vector<int> queue{2 * s};
    parent[2 * s] = -1;
    bool found = false;
    for (std::size_t qi = 0; qi < queue.size() && !found; ++qi) {
      const int st = queue[qi];
      const int x = st / 2;
      const int par = st % 2;
      for (std::uint32_t row = c.out_row(x); row; row &= row - 1) {
        const int y = std::countr_zero(row);
        const int next = 2 * y + (1 - par);
        if (parent[next] != -2) continue;
        parent[next] = st;
        if (next == 2 * s + 1) {
          found = true;
          break;
        }
        queue.push_back(next);
      }
    }
    if (!found) continue;
    std::vector<int> cycle;
    for (int st = parent[2 * s + 1]; st != -1; st = parent[st]) cycle.push_back(st / 2);
    std::reverse(cycle.begin(), cycle.end());
    if (!best || cycle.size() < best->size()) best = cycle;
  }
  return best;
}

B2Analysis analyse_b2(const Pattern& p) {
  B2Analysis a;
  if (!is_reflexive(p)) {
    a.reason = B2Reason::NotReflexive;
    return a;
  }
  if (auto cyc = odd_cycle_in_complement(p)) {
    a.reason = B2Reason::OddCycle;
    a.odd_cycle = std::move(*cyc);
    return a;
  }
  a.member = true;
  return a;
}

bool in_B2(const Pattern& p) { return analyse_b2(p).member; }

std::vector<std::pair<int, int>> true_twins(const Pattern& p) {
  if (!is_reflexive(p)) throw Error(ErrorCode::NotReflexive, "true twins are defined on reflexive patterns");
  std::vector<std::pair<int, int>> out;
  for (int a = 0; a < p.size(); ++a) {
    for (int b = a + 1; b < p.size(); ++b) {
      if (p.out_row(a) == p.out_row(b) && p.in_row(a) == p.in_row(b)) out.emplace_back(a, b);
    }
  }
  return out;
}

Pattern contract_true_twins(const Pattern& p, const std::string& x, const std::string& y) {
  const int a = p.index_of(x);
  const int b = p.index_of(y);
  if (a == b || p.out_row(a) != p.out_row(b) || p.in_row(a) != p.in_row(b) || !p.has_arc(a, a)) {
    throw Error(ErrorCode::NotTwins, "'" + x + "' and '" + y + "' are not true twins");
  }
  return induced_subpattern(p, p.all_colours() & ~(1U << b));
}

Pattern blow_up(const Pattern& p, const std::string& v, int k) {
  const int x = p.index_of(v);
  if (k < 1) throw Error(ErrorCode::TooLarge, "blow-up needs k >= 1");
  if (k == 1) return p;
  if (p.size() + k - 1 > Pattern::kMaxColours) throw Error(ErrorCode::TooLarge, "too many colours");
  // Old index -> first new index; copies of x occupy x .. x+k-1.
  auto shift = [&](int c) { return c < x ? c : c + k - 1; };
  std::vector<std::string> names;
  for (int c = 0; c < p.size(); ++c) {
    if (c == x) {
      for (int i = 1; i <= k; ++i) names.push_back(v + "_" + std::to_string(i));
    } else {
      names.push_back(p.name(c));
    }
  }
  const std::uint32_t copies = ((1U << k) - 1) << x;
  std::vector<std::uint32_t> rows(names.size(), 0);
  auto map_row = [&](std::uint32_t row) {
    std::uint32_t out = 0;
    for (; row; row &= row - 1) {
      const int c = std::countr_zero(row);
      out |= c == x ? copies : (1U << shift(c));
    }
    return out;
  };
  for (int c = 0; c < p.size(); ++c) {
    const std::uint32_t r = map_row(p.out_row(c));
    if (c == x) {
      for (int i = 0; i < k; ++i) rows[x + i] = r;
    } else {
      rows[shift(c)] = r;
    }
  }
  return Pattern::from_rows(std::move(names), std::move(rows));
}

bool verify_obstruction(const Pattern& p, const ObstructionWitness& w) {
  if (w.walk.empty() || w.blockers.size() + 1 != w.walk.size()) return false;
  for (int c : w.walk) {
    if (c < 0 || c >= p.size()) return false;
  }
  for (std::size_t i = 0; i + 1 < w.walk.size(); ++i) {
    if (!p.has_arc(w.walk[i], w.walk[i + 1])) return false;
    if (w.blockers[i] < 0 || w.blockers[i] >= p.size() || p.has_arc(w.walk[i], w.blockers[i])) return false;
  }
  if (w.closing != std::make_pair(w.walk.back(), w.walk.front())) return false;
  return !p.has_arc(w.closing.first, w.closing.second);
}

std::optional<ObstructionWitness> find_obstruction(const Pattern& p) {
  const int n = p.size();
  const std::uint32_t all = p.all_colours();
  std::optional<ObstructionWitness> best;
  for (int s = 0; s < n; ++s) {
    // BFS over walks from s whose non-final colours all miss some out-arc.
    // The one-colour walk (s) counts when s has no loop.
    std::vector<int> parent(n, -2);
    std::vector<int> queue;
    std::optional<int> end;
    if (!p.has_arc(s, s)) {
      end = s;
    } else if ((p.out_row(s) & all) != all) {
      for (std::uint32_t row = p.out_row(s); row; row &= row - 1) {
        const int y = std::countr_zero(row);
        if (parent[y] != -2) continue;
        parent[y] = s;
        queue.push_back(y);
      }
    }
    for (std::size_t qi = 0; !end && qi < queue.size(); ++qi) {
      const int x = queue[qi];
      if (!p.has_arc(x, s)) {
        end = x;
        break;
      }
      if ((p.out_row(x) & all) == all) continue;
      for (std::uint32_t row = p.out_row(x); row; row &= row - 1) {
        const int y = std::countr_zero(row);
        if (parent[y] != -2) continue;
        parent[y] = x;
        queue.push_back(y);
      }
    }
    if (!end) continue;
    ObstructionWitness w;
    if (*end == s && !p.has_arc(s, s) && queue.empty()) {
      w.walk = {s};
    } else {
      for (int x = *end;; x = parent[x]) {
        w.walk.push_back(x);
        if (parent[x] == s) break;
      }
      w.walk.push_back(s);
      std::reverse(w.walk.begin(), w.walk.end());
    }
    for (std::size_t i = 0; i + 1 < w.walk.size(); ++i) {
      w.blockers.push_back(std::countr_zero(~p.out_row(w.walk[i]) & all));
    }
    w.closing = {w.walk.back(), w.walk.front()};
    if (!verify_obstruction(p, w)) throw Error(ErrorCode::Internal, "obstruction witness failed self-check");
    if (!best || w.walk.size() < best->walk.size()) best = std::move(w);
  }
  return best;
}

std::string_view panchromatic_name(Panchromatic p) {
  switch (p) {
    case Panchromatic::Yes: return "yes";
    case Panchromatic::No: return "no";
    case Panchromatic::OpenF1: return "open";
  }
  return "?";
}

StructuralVerdict structural_panchromatic(const Pattern& p, bool f1_is_panchromatic) {
  StructuralVerdict v;
  if (!is_reflexive(p)) {
    v.not_reflexive = true;
    return v;
  }
  const std::uint32_t all = p.all_colours();
  for (std::uint32_t v1 = 1; v1 <= all; ++v1) {
    if ((v1 & all) != v1) continue;
    const std::uint32_t v2 = all & ~v1;
    if (!complete_reflexive_on(p, v1) || !complete_reflexive_on(p, v2)) continue;
    bool forward_all = true;
    bool forward_none = true;
    bool back_none = true;
    for (int a = 0; a < p.size(); ++a) {
      if ((v1 >> a) & 1U) {
        const std::uint32_t f = p.out_row(a) & v2;
        forward_all = forward_all && f == v2;
        forward_none = forward_none && f == 0;
      } else {
        back_none = back_none && (p.out_row(a) & v1) == 0;
      }
    }
    int arrangement = 0;
    if (forward_none && back_none) {
      arrangement = 1;
    } else if (forward_all && back_none) {
      arrangement = 2;
    } else if (forward_all && f1_is_panchromatic) {
      arrangement = 3;
    }
    if (arrangement && (!v.yes || arrangement < v.arrangement)) {
      v.yes = true;
      v.part1 = v1;
      v.part2 = v2;
      v.arrangement = arrangement;
    }
  }
  return v;
}

Pattern pattern_f1() {
  std::vector<std::pair<std::string, std::string>> arcs;
  for (const char* a : {"r", "g", "b"}) {
    for (const char* b : {"r", "g", "b"}) {
      if (std::string(a) == "b" && std::string(b) == "g") continue;
      arcs.emplace_back(a, b);
    }
  }
  return Pattern({"r", "g", "b"}, arcs);
}

Pattern pattern_f4() {
  return Pattern({"x", "y", "v"},
                 {{"x", "x"}, {"y", "y"}, {"v", "v"}, {"x", "y"}, {"y", "x"}, {"y", "v"}});
}

Pattern pattern_f5() {
  return Pattern({"x", "y", "v"}, {{"x", "x"}, {"y", "y"}, {"v", "v"}, {"x", "y"}, {"y", "x"},
                                   {"y", "v"}, {"v", "y"}});
}

Pattern pattern_two_isolated() { return Pattern({"a", "b"}, {{"a", "a"}, {"b", "b"}}); }

Pattern pattern_b2_not_b3() {
  const std::vector<std::string> cs = {"u", "u'", "b", "g"};
  const std::vector<std::pair<std::string, std::string>> missing = {
      {"b", "u"}, {"g", "u'"}, {"b", "g"}, {"g", "b"}};
  std::vector<std::pair<std::string, std::string>> arcs;
  for (const auto& a : cs) {
    for (const auto& b : cs) {
      if (std::find(missing.begin(), missing.end(), std::make_pair(a, b)) == missing.end()) {
        arcs.emplace_back(a, b);
      }
    }
  }
  return Pattern(cs, arcs);
}

std::vector<CatalogueEntry> three_vertex_catalogue() {
  struct Named {
    std::string name;
    Pattern pattern;
    Panchromatic status;
    std::string evidence;
  };
  const std::string yes_tag = "transitive+walk-panchromatic";
  const std::string no_tag = "transitive+not-walk-panchromatic";
  const std::vector<Named> named = {
      {"K3", named_three({{"a", "b"}, {"b", "a"}, {"a", "c"}, {"c", "a"}, {"b", "c"}, {"c", "b"}}),
       Panchromatic::Yes, yes_tag},
      {"K1*K2", named_three({{"a", "b"}, {"a", "c"}, {"b", "c"}, {"c", "b"}}), Panchromatic::Yes, yes_tag},
      {"K2*K1", named_three({{"a", "b"}, {"b", "a"}, {"a", "c"}, {"b", "c"}}), Panchromatic::Yes, yes_tag},
      {"K2+K1", named_three({{"a", "b"}, {"b", "a"}}), Panchromatic::Yes, yes_tag},
      {"2K1*K1", named_three({{"a", "c"}, {"b", "c"}}), Panchromatic::No, no_tag},
      {"T3", named_three({{"a", "b"}, {"a", "c"}, {"b", "c"}}), Panchromatic::No, no_tag},
      {"(K1*K1)+K1", named_three({{"a", "b"}}), Panchromatic::No, no_tag},
      {"K1*2K1", named_three({{"a", "b"}, {"a", "c"}}), Panchromatic::No, no_tag},
      {"3K1", named_three({}), Panchromatic::No, no_tag},
      {"F1", pattern_f1(), Panchromatic::OpenF1, "open-problem"},
      {"F4", pattern_f4(), Panchromatic::No, "twin-gadget-F4"},
      {"F5", pattern_f5(), Panchromatic::No, "twin-gadget-F5"},
  };
  std::map<CanonicalCode, const Named*> by_code;
  for (const auto& n : named) by_code[canonical_code(n.pattern)] = &n;

  std::vector<CatalogueEntry> out;
  int obstruction_label = 0;
  for (auto& p : enumerate_patterns_exact(3)) {
    CatalogueEntry e;
    e.code = canonical_code(p);
    e.transitive = is_transitive(p);
    e.in_b2 = in_B2(p);
    e.obstruction = find_obstruction(p);
    auto it = by_code.find(e.code);
    if (it != by_code.end()) {
      e.names = {it->second->name};
      e.panchromatic_by_paths = it->second->status;
      e.evidence = it->second->evidence;
    } else if (!e.transitive && e.obstruction) {
      e.names = {"obstruction-" + std::to_string(++obstruction_label)};
      e.panchromatic_by_paths = Panchromatic::No;
      e.evidence = "obstruction-walk";
    } else {
      throw Error(ErrorCode::Internal, "unclassified 3-colour pattern " + e.code.hex());
    }
    e.pattern = std::move(p);
    out.push_back(std::move(e));
  }
  return out;
}

std::string catalogue_table(const std::vector<CatalogueEntry>& entries) {
  std::string out;
  for (const auto& e : entries) {
    std::string names;
    for (const auto& n : e.names) names += (names.empty() ? "" : ",") + n;
    out += e.code.hex() + "  " + names + "  transitive=" + (e.transitive ? "yes" : "no") +
           " b2=" + (e.in_b2 ? "yes" : "no") +
           " panchromatic=" + std::string(panchromatic_name(e.panchromatic_by_paths)) +
           " obstruction=" + (e.obstruction ? "yes" : "no") + "  " + e.evidence + "\n";
  }
  return out;
}

}  // namespace hkernel
