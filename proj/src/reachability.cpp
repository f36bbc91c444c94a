#include "hkernel/reachability.hpp"

#include "hkernel/error.hpp"
#include "hkernel/pattern_class.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdlib>
#include <deque>
#include <unordered_set>

namespace hkernel {

namespace {

void check_pair(const ColouredMultidigraph& d, int u, int v) {
  if (u < 0 || u >= d.vertex_count() || v < 0 || v >= d.vertex_count()) {
    throw Error(ErrorCode::UnknownVertex, "vertex index out of range");
  }
  if (u == v) throw Error(ErrorCode::SameVertex, "reachability needs two distinct vertices");
}

template <class F>
void for_each_bit(std::uint64_t bits, F&& f) {
  while (bits) {
    f(std::countr_zero(bits));
    bits &= bits - 1;
  }
}

// Closure engine shared by the path queries. Colour index C stands for "no arc
// used yet" and allows every colour. Colours with equal transition rows are
// interchangeable as the last colour, so states key on a representative.
class PathEngine {
public:
  explicit PathEngine(const ReachProblem& p)
      : p_(p), n_(p.n), states_per_vertex_(p.colours + 1), trans_(p.colours + 1), rep_(p.colours + 1) {
    if (n_ > ColouredMultidigraph::kMaxVertices) {
      throw Error(ErrorCode::TooLarge, "path search supports at most 64 vertices");
    }
    const std::uint32_t all = p.colours >= 32 ? ~0U : ((1U << p.colours) - 1);
    for (int c = 0; c < p.colours; ++c) trans_[c] = p.transitions[c];
    trans_[p.colours] = all;
    for (int c = 0; c <= p.colours; ++c) {
      rep_[c] = c;
      for (int b = 0; b < c; ++b) {
        if (trans_[b] == trans_[c]) {
          rep_[c] = rep_[b];
          break;
        }
      }
    }
    const std::uint64_t dense_entries =
        n_ <= 20 ? (std::uint64_t{1} << n_) * static_cast<std::uint64_t>(n_) * states_per_vertex_ : 0;
    dense_ = n_ <= 20 && dense_entries <= (std::uint64_t{1} << 22);
    if (dense_) dense_entries_ = dense_entries;
    prune_ = n_ >= 6;
    if (prune_) build_walk_bounds();
  }

  VertexSet closure_from(int s, std::uint64_t budget) {
    reset_memo();
    VertexSet reached;
    const VertexSet bound = prune_ ? walk_bound(s, p_.colours) : VertexSet::full(n_);
    const VertexSet target = bound - VertexSet::of({s});
    std::vector<State> stack;
    const State start{std::uint64_t{1} << s, s, p_.colours};
    mark(start);
    stack.push_back(start);
    std::uint64_t expansions = 0;
    while (!stack.empty() && !(target - reached).empty()) {
      const State st = stack.back();
      stack.pop_back();
      if (++expansions > budget) throw BudgetExceeded(budget);
      if (prune_ && (walk_bound(st.cur, st.last) - reached).empty()) continue;
      const std::uint32_t allowed = trans_[st.last];
      const std::uint32_t* row = p_.pair_colours.data() + static_cast<std::size_t>(st.cur) * n_;
      for (int y = 0; y < n_; ++y) {
        if ((st.mask >> y) & 1U) continue;
        std::uint32_t cols = row[y] & allowed;
        if (!cols) continue;
        reached.insert(y);
        const std::uint64_t mask = st.mask | (std::uint64_t{1} << y);
        while (cols) {
          const int c = std::countr_zero(cols);
          cols &= cols - 1;
          const State next{mask, y, rep_[c]};
          if (mark(next)) stack.push_back(next);
        }
      }
    }
    return reached;
  }

  // Depth-first search for one path s -> t; fills `out` with (vertex, colour) steps.
  bool find_path(int s, int t, std::uint64_t budget, std::vector<std::pair<int, int>>& out) {
    reset_memo();
    expansions_ = 0;
    budget_ = budget;
    target_ = t;
    const State start{std::uint64_t{1} << s, s, p_.colours};
    mark(start);
    return dfs(start, out);
  }

private:
  struct State {
    std::uint64_t mask;
    int cur;
    int last;
  };
  struct StateHash {
    std::size_t operator()(const std::pair<std::uint64_t, std::uint32_t>& k) const noexcept {
      return std::hash<std::uint64_t>{}(k.first * 0x9E3779B97F4A7C15ULL ^ k.second);
    }
  };

  bool dfs(const State& st, std::vector<std::pair<int, int>>& out) {
    if (++expansions_ > budget_) throw BudgetExceeded(budget_);
    const std::uint32_t allowed = trans_[st.last];
    const std::uint32_t* row = p_.pair_colours.data() + static_cast<std::size_t>(st.cur) * n_;
    for (int y = 0; y < n_; ++y) {
      if ((st.mask >> y) & 1U) continue;
      std::uint32_t cols = row[y] & allowed;
      while (cols) {
        const int c = std::countr_zero(cols);
        cols &= cols - 1;
        if (y == target_) {
          out.emplace_back(y, c);
          return true;
        }
        if (prune_ && !walk_bound(y, rep_[c]).contains(target_)) continue;
        const State next{st.mask | (std::uint64_t{1} << y), y, rep_[c]};
        if (!mark(next)) continue;
        out.emplace_back(y, c);
        if (dfs(next, out)) return true;
        out.pop_back();
      }
    }
    return false;
  }

  VertexSet walk_bound(int v, int last) const {
    return walk_bounds_[static_cast<std::size_t>(v) * states_per_vertex_ + last];
  }

  // Vertices reachable by walks from each state: BFS on the product space.
  void build_walk_bounds() {
    const int S = n_ * states_per_vertex_;
    walk_bounds_.assign(S, VertexSet());
    std::vector<std::uint8_t> seen(S);
    std::vector<int> queue;
    for (int v = 0; v < n_; ++v) {
      for (int h = 0; h <= p_.colours; ++h) {
        if (rep_[h] != h) continue;
        std::fill(seen.begin(), seen.end(), 0);
        queue.assign(1, v * states_per_vertex_ + h);
        seen[queue[0]] = 1;
        VertexSet reached;
        for (std::size_t qi = 0; qi < queue.size(); ++qi) {
          const int x = queue[qi] / states_per_vertex_;
          const int last = queue[qi] % states_per_vertex_;
          const std::uint32_t* row = p_.pair_colours.data() + static_cast<std::size_t>(x) * n_;
          for (int y = 0; y < n_; ++y) {
            std::uint32_t cols = row[y] & trans_[last];
            while (cols) {
              const int c = std::countr_zero(cols);
              cols &= cols - 1;
              reached.insert(y);
              const int id = y * states_per_vertex_ + rep_[c];
              if (!seen[id]) {
                seen[id] = 1;
                queue.push_back(id);
              }
            }
          }
        }
        walk_bounds_[static_cast<std::size_t>(v) * states_per_vertex_ + h] = reached;
      }
    }
    for (int v = 0; v < n_; ++v) {
      for (int h = 0; h <= p_.colours; ++h) {
        walk_bounds_[static_cast<std::size_t>(v) * states_per_vertex_ + h] =
            walk_bounds_[static_cast<std::size_t>(v) * states_per_vertex_ + rep_[h]];
      }
    }
  }

  void reset_memo() {
    if (dense_) {
      auto& table = dense_table();
      if (table.size() < dense_entries_) table.assign(dense_entries_, 0);
      auto& gen = dense_generation();
      if (++gen == 0) {
        std::fill(table.begin(), table.end(), 0);
        gen = 1;
      }
    } else {
      sparse_.clear();
    }
  }

  // Returns true if the state was not seen before.
  bool mark(const State& st) {
    const std::uint32_t local = static_cast<std::uint32_t>(st.cur * states_per_vertex_ + st.last);
    if (dense_) {
      auto& table = dense_table();
      const std::size_t idx =
          static_cast<std::size_t>(st.mask) * n_ * states_per_vertex_ + local;
      const auto gen = dense_generation();
      if (table[idx] == gen) return false;
      table[idx] = gen;
      return true;
    }
    return sparse_.emplace(st.mask, local).second;
  }

  static std::vector<std::uint32_t>& dense_table() {
    thread_local std::vector<std::uint32_t> table;
    return table;
  }
  static std::uint32_t& dense_generation() {
    thread_local std::uint32_t gen = 0;
    return gen;
  }

  const ReachProblem& p_;
  int n_;
  int states_per_vertex_;
  std::vector<std::uint32_t> trans_;
  std::vector<int> rep_;
  bool dense_ = false;
  std::size_t dense_entries_ = 0;
  bool prune_ = false;
  std::vector<VertexSet> walk_bounds_;
  std::unordered_set<std::pair<std::uint64_t, std::uint32_t>, StateHash> sparse_;
  std::uint64_t expansions_ = 0;
  std::uint64_t budget_ = 0;
  int target_ = -1;
};

}  // namespace

std::string_view semantics_name(Semantics s) { return s == Semantics::Walk ? "walk" : "path"; }

Semantics parse_semantics(std::string_view s) {
  if (s == "walk") return Semantics::Walk;
  if (s == "path") return Semantics::Path;
  throw Error(ErrorCode::SyntaxError, "semantics must be 'walk' or 'path', got '" + std::string(s) + "'");
}

bool verify_walk(const ColouredMultidigraph& d, const Trail& t) {
  if (t.vertices.empty() || t.arcs.size() + 1 != t.vertices.size() || t.colours.size() != t.arcs.size()) {
    return false;
  }
  for (int v : t.vertices) {
    if (v < 0 || v >= d.vertex_count()) return false;
  }
  for (std::size_t i = 0; i < t.arcs.size(); ++i) {
    const int a = t.arcs[i];
    if (a < 0 || a >= d.arc_count()) return false;
    const Arc& arc = d.arcs()[a];
    if (arc.tail != t.vertices[i] || arc.head != t.vertices[i + 1] || arc.colour != t.colours[i]) {
      return false;
    }
    if (i > 0 && !d.pattern().has_arc(t.colours[i - 1], t.colours[i])) return false;
  }
  return true;
}

bool verify_path(const ColouredMultidigraph& d, const Trail& t) {
  if (!verify_walk(d, t)) return false;
  VertexSet seen;
  for (int v : t.vertices) {
    if (seen.contains(v)) return false;
    seen.insert(v);
  }
  return true;
}

std::string render_trail(const ColouredMultidigraph& d, const Trail& t) {
  std::string out;
  for (std::size_t i = 0; i < t.arcs.size(); ++i) {
    out += d.name(t.vertices[i]) + " > " + d.name(t.vertices[i + 1]) + " : " +
           d.pattern().name(t.colours[i]) + "\n";
  }
  return out;
}

std::uint64_t default_path_budget() {
  if (const char* env = std::getenv("HKERNEL_BUDGET")) {
    std::uint64_t v = 0;
    const char* end = env + std::char_traits<char>::length(env);
    auto [ptr, ec] = std::from_chars(env, end, v);
    if (ec == std::errc() && ptr == end && v > 0) return v;
  }
  return 10'000'000;
}

std::optional<WalkCertificate> walk_reachable(const ColouredMultidigraph& d, int u, int v,
                                              WalkStats* stats) {
  check_pair(d, u, v);
  const int n = d.vertex_count();
  const int C = d.pattern().size();
  std::vector<std::vector<int>> out_arcs(n);
  for (int a = 0; a < d.arc_count(); ++a) out_arcs[d.arcs()[a].tail].push_back(a);

  // State (x, h): at x, last arc coloured h. parent_arc holds the arc that
  // first reached the state; -1 marks unseen.
  std::vector<int> parent_arc(static_cast<std::size_t>(n) * C, -1);
  std::deque<int> queue;
  WalkStats local;

  int found = -1;
  for (int a : out_arcs[u]) {
    ++local.arcs_examined;
    const Arc& e = d.arcs()[a];
    const std::size_t id = static_cast<std::size_t>(e.head) * C + e.colour;
    if (parent_arc[id] != -1) continue;
    parent_arc[id] = a;
    if (e.head == v) {
      found = static_cast<int>(id);
      break;
    }
    queue.push_back(static_cast<int>(id));
  }
  std::vector<int> parent_state(static_cast<std::size_t>(n) * C, -1);
  while (found < 0 && !queue.empty()) {
    const int s = queue.front();
    queue.pop_front();
    ++local.states_expanded;
    const int x = s / C;
    const int h = s % C;
    for (int a : out_arcs[x]) {
      ++local.arcs_examined;
      const Arc& e = d.arcs()[a];
      if (!d.pattern().has_arc(h, e.colour)) continue;
      const std::size_t id = static_cast<std::size_t>(e.head) * C + e.colour;
      if (parent_arc[id] != -1) continue;
      parent_arc[id] = a;
      parent_state[id] = s;
      if (e.head == v) {
        found = static_cast<int>(id);
        break;
      }
      queue.push_back(static_cast<int>(id));
    }
  }
  if (stats) *stats = local;
  if (found < 0) return std::nullopt;

  Trail t;
  for (int s = found; s != -1; s = parent_state[s]) {
    const Arc& e = d.arcs()[parent_arc[s]];
    t.arcs.push_back(parent_arc[s]);
    t.colours.push_back(e.colour);
    t.vertices.push_back(e.head);
  }
  t.vertices.push_back(u);
  std::reverse(t.arcs.begin(), t.arcs.end());
  std::reverse(t.colours.begin(), t.colours.end());
  std::reverse(t.vertices.begin(), t.vertices.end());
  if (!verify_walk(d, t) || t.vertices.front() != u || t.vertices.back() != v) {
    throw Error(ErrorCode::Internal, "walk certificate failed self-check");
  }
  return t;
}

std::optional<PathCertificate> path_reachable(const ColouredMultidigraph& d, int u, int v,
                                              std::uint64_t budget) {
  check_pair(d, u, v);
  const auto owned = reach_problem(d);
  PathEngine engine(owned.problem);
  std::vector<std::pair<int, int>> steps;
  if (!engine.find_path(u, v, budget, steps)) return std::nullopt;
  Trail t;
  t.vertices.push_back(u);
  int cur = u;
  for (auto [y, c] : steps) {
    t.vertices.push_back(y);
    t.colours.push_back(c);
    t.arcs.push_back(*d.find_arc(cur, y, c));
    cur = y;
  }
  if (!verify_path(d, t) || t.vertices.back() != v) {
    throw Error(ErrorCode::Internal, "path certificate failed self-check");
  }
  return t;
}

int ReachDigraph::arc_count() const {
  int total = 0;
  for (auto s : out) total += s.size();
  return total;
}

ReachDigraph reach_digraph(const ColouredMultidigraph& d, Semantics s, std::uint64_t budget) {
  const auto owned = reach_problem(d);
  return ReachDigraph{d.vertices(), closure(owned.problem, s, budget), s};
}

PathCertificate extract_path_from_walk(const ColouredMultidigraph& d, const WalkCertificate& w) {
  if (!is_transitive(d.pattern())) {
    throw Error(ErrorCode::NotTransitive, "shortcutting a walk needs a transitive pattern");
  }
  if (!verify_walk(d, w)) throw Error(ErrorCode::InvalidCertificate, "not an H-walk of the digraph");
  Trail t = w;
  while (true) {
    // First vertex that occurs again later; cut back to its last occurrence.
    int i = -1;
    int j = -1;
    for (int a = 0; a < static_cast<int>(t.vertices.size()) && i < 0; ++a) {
      for (int b = static_cast<int>(t.vertices.size()) - 1; b > a; --b) {
        if (t.vertices[b] == t.vertices[a]) {
          i = a;
          j = b;
          break;
        }
      }
    }
    if (i < 0) break;
    t.vertices.erase(t.vertices.begin() + i + 1, t.vertices.begin() + j + 1);
    t.arcs.erase(t.arcs.begin() + i, t.arcs.begin() + j);
    t.colours.erase(t.colours.begin() + i, t.colours.begin() + j);
  }
  if (!verify_path(d, t)) throw Error(ErrorCode::Internal, "shortcut path failed self-check");
  return t;
}

OwnedReachProblem reach_problem(const ColouredMultidigraph& d) {
  OwnedReachProblem o;
  o.transitions = d.pattern().out_rows();
  o.problem.n = d.vertex_count();
  o.problem.colours = d.pattern().size();
  o.problem.pair_colours = d.pair_colour_matrix();
  o.problem.transitions = o.transitions;
  return o;
}

VertexSet walk_reach_from(const ReachProblem& p, int source) {
  const int n = p.n;
  const int C = p.colours;
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(n) * C, 0);
  std::vector<int> queue;
  VertexSet reached;
  auto visit = [&](int y, std::uint32_t cols) {
    while (cols) {
      const int c = std::countr_zero(cols);
      cols &= cols - 1;
      reached.insert(y);
      const int id = y * C + c;
      if (!seen[id]) {
        seen[id] = 1;
        queue.push_back(id);
      }
    }
  };
  for (int y = 0; y < n; ++y) visit(y, p.pair_colours[static_cast<std::size_t>(source) * n + y]);
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    const int x = queue[qi] / C;
    const std::uint32_t allowed = p.transitions[queue[qi] % C];
    for (int y = 0; y < n; ++y) visit(y, p.pair_colours[static_cast<std::size_t>(x) * n + y] & allowed);
  }
  reached.erase(source);
  return reached;
}

VertexSet path_reach_from(const ReachProblem& p, int source, std::uint64_t budget) {
  PathEngine engine(p);
  return engine.closure_from(source, budget);
}

std::vector<VertexSet> walk_closure(const ReachProblem& p) {
  std::vector<VertexSet> out(p.n);
  for (int s = 0; s < p.n; ++s) out[s] = walk_reach_from(p, s);
  return out;
}

std::vector<VertexSet> path_closure(const ReachProblem& p, std::uint64_t budget) {
  PathEngine engine(p);
  std::vector<VertexSet> out(p.n);
  for (int s = 0; s < p.n; ++s) out[s] = engine.closure_from(s, budget);
  return out;
}

std::vector<VertexSet> closure(const ReachProblem& p, Semantics s, std::uint64_t budget) {
  return s == Semantics::Walk ? walk_closure(p) : path_closure(p, budget);
}

}  // namespace hkernel
