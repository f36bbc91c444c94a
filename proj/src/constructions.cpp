#include "hkernel/constructions.hpp"

#include "hkernel/error.hpp"
#include "hkernel/pattern_class.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace hkernel {

namespace {

std::string fresh_name(const std::string& base, const std::set<std::string>& taken, const std::string& suffix) {
  std::string name = base;
  while (taken.count(name)) name += suffix;
  return name;
}

std::set<std::string> name_set(const std::vector<std::string>& names) {
  return std::set<std::string>(names.begin(), names.end());
}

// Index of each of d's colours in `target`, matched by name.
std::vector<int> colour_map(const ColouredMultidigraph& d, const Pattern& target) {
  std::vector<int> map;
  for (const auto& c : d.pattern().colours()) {
    auto idx = target.find(c);
    if (!idx) throw Error(ErrorCode::UnknownColour, "colour '" + c + "' is not one of the gadget colours");
    map.push_back(*idx);
  }
  return map;
}

Gadget twin_gadget(const ColouredMultidigraph& d, bool f4) {
  const auto pats = f4 ? f4_gadget_patterns() : f5_gadget_patterns();
  const Pattern& h = *pats.derived;
  const auto cmap = colour_map(d, h);
  const int x = h.index_of("x");
  const int y = h.index_of("y");
  const int w = h.index_of("w");
  const int n = d.vertex_count();

  std::vector<std::string> vertices = d.vertices();
  std::vector<Arc> arcs;
  for (const auto& a : d.arcs()) arcs.push_back({a.tail, a.head, cmap[a.colour]});

  GadgetMap m;
  m.kind = f4 ? GadgetKind::F4 : GadgetKind::F5;
  m.original_vertices = d.vertices();
  auto taken = name_set(vertices);
  for (int s = 0; s < n; ++s) {
    VertexSet x_in;
    VertexSet w_out;
    for (int v = 0; v < n; ++v) {
      if (v == s) continue;
      for (int c = 0; c < d.pattern().size(); ++c) {
        if (cmap[c] == x && ((d.pair_colours(v, s) >> c) & 1U)) x_in.insert(v);
        if (cmap[c] == w && ((d.pair_colours(s, v) >> c) & 1U)) w_out.insert(v);
      }
    }
    VertexSet targets;
    for (int t : w_out.indices()) {
      if (!(x_in - VertexSet::of({t})).empty()) targets.insert(t);
    }
    if (targets.empty()) continue;
    const std::string hat = fresh_name(d.name(s) + "^", taken, "^");
    taken.insert(hat);
    const int sh = static_cast<int>(vertices.size());
    vertices.push_back(hat);
    m.hats.emplace_back(d.name(s), hat);
    arcs.push_back({s, sh, y});
    if (f4) arcs.push_back({s, sh, w});
    arcs.push_back({sh, s, y});
    for (int t : targets.indices()) arcs.push_back({sh, t, w});
  }
  if (vertices.size() > static_cast<std::size_t>(ColouredMultidigraph::kMaxVertices)) {
    throw Error(ErrorCode::TooLarge, "gadget output exceeds 64 vertices");
  }
  m.derived_vertices = vertices;
  return Gadget{ColouredMultidigraph(pats.derived, std::move(vertices), std::move(arcs)), std::move(m)};
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string t; in >> t;) out.push_back(t);
  return out;
}

}  // namespace

std::string_view gadget_kind_name(GadgetKind k) {
  switch (k) {
    case GadgetKind::F4: return "F4";
    case GadgetKind::F5: return "F5";
    case GadgetKind::F1Simplify: return "F1Simplify";
    case GadgetKind::LinearSum: return "LinearSum";
  }
  return "?";
}

std::string serialize_gadget_map(const GadgetMap& m) {
  auto list = [](const std::vector<std::string>& v) {
    std::string s;
    for (const auto& x : v) s += " " + x;
    return s;
  };
  std::string out = "gadget-map\nkind: " + std::string(gadget_kind_name(m.kind)) + "\n";
  out += "original:" + list(m.original_vertices) + "\n";
  out += "derived:" + list(m.derived_vertices) + "\n";
  for (const auto& [s, h] : m.hats) out += "hat: " + s + " " + h + "\n";
  for (std::size_t i = 0; i < m.z1.size(); ++i) out += "z: " + m.z1[i] + " " + m.z2[i] + "\n";
  for (const auto& [a, b] : m.renamed) out += "renamed: " + a + " " + b + "\n";
  return out;
}

GadgetMap parse_gadget_map(std::string_view text) {
  GadgetMap m;
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    if (!header) {
      if (line.substr(first) != "gadget-map") throw SyntaxError(number, 1, "expected 'gadget-map' header");
      header = true;
      continue;
    }
    const auto colon = line.find(':');
    if (colon == std::string::npos) throw SyntaxError(number, 1, "expected 'key: values'");
    const std::string key = line.substr(first, colon - first);
    const auto vals = split_ws(line.substr(colon + 1));
    auto need = [&](std::size_t k) {
      if (vals.size() != k) throw SyntaxError(number, static_cast<int>(colon) + 2, "wrong number of values");
    };
    if (key == "kind") {
      need(1);
      if (vals[0] == "F4") m.kind = GadgetKind::F4;
      else if (vals[0] == "F5") m.kind = GadgetKind::F5;
      else if (vals[0] == "F1Simplify") m.kind = GadgetKind::F1Simplify;
      else if (vals[0] == "LinearSum") m.kind = GadgetKind::LinearSum;
      else throw SyntaxError(number, static_cast<int>(colon) + 3, "unknown gadget kind");
    } else if (key == "original") {
      m.original_vertices = vals;
    } else if (key == "derived") {
      m.derived_vertices = vals;
    } else if (key == "hat") {
      need(2);
      m.hats.emplace_back(vals[0], vals[1]);
    } else if (key == "z") {
      need(2);
      m.z1.push_back(vals[0]);
      m.z2.push_back(vals[1]);
    } else if (key == "renamed") {
      need(2);
      m.renamed.emplace_back(vals[0], vals[1]);
    } else {
      throw SyntaxError(number, static_cast<int>(first) + 1, "unknown key '" + key + "'");
    }
  }
  if (!header) throw SyntaxError(1, 1, "expected 'gadget-map' header");
  return m;
}

std::vector<std::string> kernel_pullback(const std::vector<std::string>& k_prime, const GadgetMap& m) {
  const std::set<std::string> kp(k_prime.begin(), k_prime.end());
  std::set<std::string> result;
  switch (m.kind) {
    case GadgetKind::F4:
    case GadgetKind::F5: {
      std::set<std::string> hats;
      for (const auto& [s, h] : m.hats) hats.insert(h);
      for (const auto& v : kp) {
        if (!hats.count(v)) result.insert(v);
      }
      for (const auto& [s, h] : m.hats) {
        if (kp.count(h)) result.insert(s);
      }
      break;
    }
    case GadgetKind::F1Simplify: {
      const auto orig = name_set(m.original_vertices);
      for (const auto& v : kp) {
        if (orig.count(v)) result.insert(v);
      }
      break;
    }
    case GadgetKind::LinearSum:
      for (const auto& [orig, in_sum] : m.renamed) {
        if (kp.count(in_sum)) result.insert(orig);
      }
      break;
  }
  // Report in the original vertex order.
  std::vector<std::string> out;
  for (const auto& v : m.original_vertices) {
    if (result.count(v)) out.push_back(v);
  }
  return out;
}

LinearSum linear_sum_digraphs(const ColouredMultidigraph& d1, const ColouredMultidigraph& d2,
                              const std::optional<std::string>& c0) {
  if (!(d1.pattern() == d2.pattern())) {
    throw Error(ErrorCode::PatternMismatch, "linear sum operands must share a pattern");
  }
  std::shared_ptr<const Pattern> pattern = d1.pattern_ptr();
  int cross = -1;
  if (c0) cross = pattern->find(*c0).value_or(-1);
  if (cross < 0) {
    const std::string name = c0 ? *c0 : fresh_name("c0", name_set(pattern->colours()), "'");
    if (pattern->find(name)) throw Error(ErrorCode::DuplicateColour, "colour '" + name + "' exists");
    std::vector<std::string> colours = pattern->colours();
    colours.push_back(name);
    std::vector<std::uint32_t> rows = pattern->out_rows();
    cross = static_cast<int>(colours.size()) - 1;
    rows.push_back(1U << cross);
    pattern = std::make_shared<const Pattern>(Pattern::from_rows(std::move(colours), std::move(rows)));
  }
  const int n1 = d1.vertex_count();
  std::vector<std::string> vertices = d1.vertices();
  auto taken = name_set(vertices);
  GadgetMap m;
  m.kind = GadgetKind::LinearSum;
  m.original_vertices = d2.vertices();
  for (const auto& v : d2.vertices()) {
    const std::string name = fresh_name(v, taken, "'");
    taken.insert(name);
    vertices.push_back(name);
    m.renamed.emplace_back(v, name);
  }
  if (vertices.size() > static_cast<std::size_t>(ColouredMultidigraph::kMaxVertices)) {
    throw Error(ErrorCode::TooLarge, "linear sum exceeds 64 vertices");
  }
  std::vector<Arc> arcs = d1.arcs();
  for (const auto& a : d2.arcs()) arcs.push_back({a.tail + n1, a.head + n1, a.colour});
  for (int u = 0; u < n1; ++u) {
    for (int v = 0; v < d2.vertex_count(); ++v) arcs.push_back({u, v + n1, cross});
  }
  m.derived_vertices = vertices;
  return LinearSum{ColouredMultidigraph(std::move(pattern), std::move(vertices), std::move(arcs)), std::move(m)};
}

Pattern linear_sum_patterns(const Pattern& h1, const Pattern& h2) {
  std::vector<std::string> colours = h1.colours();
  colours.insert(colours.end(), h2.colours().begin(), h2.colours().end());
  if (name_set(colours).size() != colours.size()) {
    throw Error(ErrorCode::DuplicateColour, "linear sum operands share a colour name");
  }
  if (colours.size() > static_cast<std::size_t>(Pattern::kMaxColours)) {
    throw Error(ErrorCode::TooLarge, "too many colours");
  }
  const int k1 = h1.size();
  const std::uint32_t right = ((h2.size() >= 32 ? 0U : (1U << h2.size())) - 1) << k1;
  std::vector<std::uint32_t> rows;
  for (int c = 0; c < k1; ++c) rows.push_back(h1.out_row(c) | right);
  for (int c = 0; c < h2.size(); ++c) rows.push_back(h2.out_row(c) << k1);
  return Pattern::from_rows(std::move(colours), std::move(rows));
}

ColouredMultidigraph linear_sum_family(const ColouredMultidigraph& base, int j) {
  if (j < 1) throw Error(ErrorCode::InvalidArgument, "family index must be at least 1");
  ColouredMultidigraph cur = base;
  std::optional<std::string> c0;
  for (int level = 2; level <= j; ++level) {
    const std::string name = fresh_name("k" + std::to_string(level - 1), name_set(cur.vertices()), "'");
    ColouredMultidigraph k1(cur.pattern_ptr(), {name}, {});
    auto sum = linear_sum_digraphs(k1, cur, c0);
    if (!c0) c0 = sum.digraph.pattern().colours().back();
    cur = std::move(sum.digraph);
  }
  return cur;
}

ColouredMultidigraph odd_cycle_witness(const Pattern& h, const std::vector<std::string>& cycle_in) {
  std::vector<std::string> cycle = cycle_in;
  if (cycle.size() > 1 && cycle.front() == cycle.back()) cycle.pop_back();
  if (cycle.size() < 3 || cycle.size() % 2 == 0) {
    throw Error(ErrorCode::NotOddCycle, "need an odd cycle of length at least 3");
  }
  if (name_set(cycle).size() != cycle.size()) throw Error(ErrorCode::NotOddCycle, "cycle repeats a colour");
  std::vector<int> idx;
  for (const auto& c : cycle) idx.push_back(h.index_of(c));
  const int len = static_cast<int>(idx.size());
  for (int i = 0; i < len; ++i) {
    if (h.has_arc(idx[i], idx[(i + 1) % len])) {
      throw Error(ErrorCode::NotInComplement,
                  "(" + cycle[i] + ", " + cycle[(i + 1) % len] + ") is an arc of the pattern");
    }
  }
  std::vector<std::string> vertices;
  for (int i = 0; i < len; ++i) vertices.push_back("x" + std::to_string(i));
  std::vector<Arc> arcs;
  for (int i = 0; i < len; ++i) arcs.push_back({i, (i + 1) % len, idx[i]});
  return ColouredMultidigraph(std::make_shared<const Pattern>(h), std::move(vertices), std::move(arcs));
}

ColouredMultidigraph obstruction_digraph(const Pattern& h, const ObstructionWitness& w) {
  if (!verify_obstruction(h, w)) throw Error(ErrorCode::InvalidArgument, "not an obstruction walk of the pattern");
  const int k = static_cast<int>(w.walk.size()) - 1;
  std::vector<std::string> vertices;
  for (int i = 0; i < 3; ++i) {
    vertices.push_back("s" + std::to_string(i));
    for (int j = 1; j <= k; ++j) vertices.push_back("u" + std::to_string(i) + "_" + std::to_string(j));
    for (int j = 1; j <= k; ++j) vertices.push_back("t" + std::to_string(i) + "_" + std::to_string(j));
  }
  const int block = 2 * k + 1;
  auto walk_vertex = [&](int i, int j) { return i * block + j; };
  std::vector<Arc> arcs;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j <= k; ++j) {
      const int head = j == k ? ((i + 1) % 3) * block : walk_vertex(i, j + 1);
      arcs.push_back({walk_vertex(i, j), head, w.walk[j]});
    }
    for (int j = 1; j <= k; ++j) arcs.push_back({walk_vertex(i, j), i * block + k + j, w.blockers[j - 1]});
  }
  return ColouredMultidigraph(std::make_shared<const Pattern>(h), std::move(vertices), std::move(arcs));
}

GadgetPatterns f4_gadget_patterns() {
  std::vector<std::pair<std::string, std::string>> arcs = {
      {"x", "x"}, {"y", "y"}, {"z", "z"}, {"w", "w"}, {"x", "y"}, {"y", "x"},
      {"y", "z"}, {"y", "w"}, {"z", "w"}, {"w", "z"}};
  auto derived = std::make_shared<const Pattern>(Pattern({"x", "y", "z", "w"}, arcs));
  arcs.emplace_back("x", "w");
  auto original = std::make_shared<const Pattern>(Pattern({"x", "y", "z", "w"}, arcs));
  return {derived, original};
}

GadgetPatterns f5_gadget_patterns() {
  std::vector<std::pair<std::string, std::string>> arcs = {
      {"x", "x"}, {"y", "y"}, {"z", "z"}, {"w", "w"}, {"x", "y"}, {"y", "x"}, {"y", "z"},
      {"z", "y"}, {"y", "w"}, {"w", "y"}, {"z", "w"}, {"w", "z"}};
  auto derived = std::make_shared<const Pattern>(Pattern({"x", "y", "z", "w"}, arcs));
  arcs.emplace_back("x", "w");
  auto original = std::make_shared<const Pattern>(Pattern({"x", "y", "z", "w"}, arcs));
  return {derived, original};
}

Gadget gadget_f4(const ColouredMultidigraph& d) { return twin_gadget(d, true); }
Gadget gadget_f5(const ColouredMultidigraph& d) { return twin_gadget(d, false); }

Gadget f1_simplify(const ColouredMultidigraph& d, const std::vector<std::pair<int, int>>* pair_order) {
  auto f1 = std::make_shared<const Pattern>(pattern_f1());
  const auto cmap = colour_map(d, *f1);
  const int r = f1->index_of("r");
  const int g = f1->index_of("g");
  const int b = f1->index_of("b");
  const int n = d.vertex_count();

  std::vector<std::pair<int, int>> order;
  if (pair_order) {
    order = *pair_order;
  } else {
    for (int u = 0; u < n; ++u) {
      for (int v = 0; v < n; ++v) {
        if (u != v) order.emplace_back(u, v);
      }
    }
  }
  std::vector<std::string> vertices = d.vertices();
  auto taken = name_set(vertices);
  std::vector<Arc> arcs;
  GadgetMap m;
  m.kind = GadgetKind::F1Simplify;
  m.original_vertices = d.vertices();
  for (auto [u, v] : order) {
    std::uint32_t cols = 0;
    for (int c = 0; c < d.pattern().size(); ++c) {
      if ((d.pair_colours(u, v) >> c) & 1U) cols |= 1U << cmap[c];
    }
    if (!cols) continue;
    if (std::popcount(cols) == 1) {
      arcs.push_back({u, v, std::countr_zero(cols)});
    } else if ((cols >> r) & 1U) {
      arcs.push_back({u, v, r});
    } else {
      const std::string stem = "_" + d.name(u) + "_" + d.name(v);
      const std::string n1 = fresh_name("z1" + stem, taken, "'");
      taken.insert(n1);
      const std::string n2 = fresh_name("z2" + stem, taken, "'");
      taken.insert(n2);
      const int z1 = static_cast<int>(vertices.size());
      vertices.push_back(n1);
      vertices.push_back(n2);
      m.z1.push_back(n1);
      m.z2.push_back(n2);
      arcs.push_back({u, v, g});
      arcs.push_back({u, z1, b});
      arcs.push_back({z1, z1 + 1, g});
      arcs.push_back({z1, v, b});
    }
  }
  if (vertices.size() > static_cast<std::size_t>(ColouredMultidigraph::kMaxVertices)) {
    throw Error(ErrorCode::TooLarge, "simplified digraph exceeds 64 vertices");
  }
  m.derived_vertices = vertices;
  return Gadget{ColouredMultidigraph(std::move(f1), std::move(vertices), std::move(arcs)), std::move(m)};
}

}  // namespace hkernel
