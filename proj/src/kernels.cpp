#include "hkernel/kernels.hpp"

#include "hkernel/error.hpp"
#include "hkernel/pattern_class.hpp"

#include <bit>

namespace hkernel {

namespace {

class AbsorbentSolver {
public:
  explicit AbsorbentSolver(const AbsorbentProblem& p) : p_(p), all_(VertexSet::full(p.n)) {
    if (p.n > ColouredMultidigraph::kMaxVertices) throw Error(ErrorCode::TooLarge, "at most 64 vertices");
  }

  // Returns false once the visitor stops the search.
  bool search(VertexSet in, VertexSet out, const std::function<bool(VertexSet)>& visit) {
    ++nodes_;
    if (!propagate(in, out)) return true;
    const VertexSet undecided = all_ - in - out;
    if (undecided.empty()) return visit(in);
    const int v = std::countr_zero(undecided.bits());
    VertexSet in2 = in;
    in2.insert(v);
    if (!search(in2, out, visit)) return false;
    VertexSet out2 = out;
    out2.insert(v);
    return search(in, out2, visit);
  }

  std::uint64_t nodes() const { return nodes_; }

private:
  bool propagate(VertexSet& in, VertexSet& out) const {
    bool changed = true;
    while (changed) {
      changed = false;
      VertexSet blocked;
      for (int v : in.indices()) blocked = blocked | p_.conflict[v];
      if (!(blocked & in).empty()) return false;
      if (!(blocked - out).empty()) {
        out = out | blocked;
        changed = true;
      }
      for (int v : out.indices()) {
        if (!(p_.absorb[v] & in).empty()) continue;
        const VertexSet cand = p_.absorb[v] - out;
        if (cand.empty()) return false;
        if (cand.size() == 1) {
          in = in | cand;
          changed = true;
        }
      }
      const VertexSet undecided = all_ - in - out;
      for (int v : undecided.indices()) {
        if ((p_.absorb[v] - out).empty()) {
          in.insert(v);
          changed = true;
        }
      }
      if (!(in & out).empty()) return false;
    }
    return true;
  }

  const AbsorbentProblem& p_;
  VertexSet all_;
  std::uint64_t nodes_ = 0;
};

std::string set_text(const ColouredMultidigraph& d, VertexSet s) {
  std::string out = "{";
  bool first = true;
  for (const auto& n : d.set_to_names(s)) {
    out += (first ? "" : ", ") + n;
    first = false;
  }
  return out + "}";
}

KernelReport solve_report(const AbsorbentProblem& p) {
  AbsorbentSolver solver(p);
  std::optional<VertexSet> found;
  solver.search(VertexSet(), VertexSet(), [&](VertexSet s) {
    found = s;
    return false;
  });
  KernelReport r;
  r.nodes = solver.nodes();
  r.status = found ? KernelStatus::Found : KernelStatus::NoneExists;
  r.witness = found;
  return r;
}

// pair_colours of d restricted to the vertices in `keep` (in increasing
// order) and to colours in `colour_mask`.
std::vector<std::uint32_t> restricted_matrix(const ColouredMultidigraph& d, const std::vector<int>& keep,
                                             std::uint32_t colour_mask) {
  const int k = static_cast<int>(keep.size());
  std::vector<std::uint32_t> m(static_cast<std::size_t>(k) * k, 0);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      if (i != j) m[static_cast<std::size_t>(i) * k + j] = d.pair_colours(keep[i], keep[j]) & colour_mask;
    }
  }
  return m;
}

std::vector<VertexSet> rows_of_matrix(const std::vector<std::uint32_t>& m, int k) {
  std::vector<VertexSet> rows(k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      if (m[static_cast<std::size_t>(i) * k + j]) rows[i].insert(j);
    }
  }
  return rows;
}

}  // namespace

std::string_view kernel_status_name(KernelStatus s) {
  switch (s) {
    case KernelStatus::Found: return "found";
    case KernelStatus::NoneExists: return "none-exists";
    case KernelStatus::Unknown: return "unknown";
  }
  return "?";
}

std::string KernelReport::describe(const ColouredMultidigraph& d) const {
  switch (status) {
    case KernelStatus::Found: return "kernel " + set_text(d, *witness);
    case KernelStatus::NoneExists:
      return "none exists (" + std::to_string(nodes) + " search nodes, every candidate refuted)";
    case KernelStatus::Unknown:
      return "unknown (path search exceeded " + std::to_string(budget) + " expansions)";
  }
  return "?";
}

std::optional<VertexSet> least_independent_absorbent(const AbsorbentProblem& p, std::uint64_t* nodes) {
  auto r = solve_report(p);
  if (nodes) *nodes = r.nodes;
  return r.witness;
}

void for_each_independent_absorbent(const AbsorbentProblem& p,
                                    const std::function<bool(VertexSet)>& visit) {
  AbsorbentSolver solver(p);
  solver.search(VertexSet(), VertexSet(), visit);
}

std::vector<VertexSet> symmetric_conflict(std::span<const VertexSet> rel) {
  std::vector<VertexSet> out(rel.begin(), rel.end());
  for (int u = 0; u < static_cast<int>(rel.size()); ++u) {
    for (int v : rel[u].indices()) out[v].insert(u);
  }
  for (int u = 0; u < static_cast<int>(out.size()); ++u) out[u].erase(u);
  return out;
}

bool is_independent(const ColouredMultidigraph& d, VertexSet s, Semantics sem, std::uint64_t budget) {
  const auto owned = reach_problem(d);
  for (int u : s.indices()) {
    const VertexSet r = sem == Semantics::Walk ? walk_reach_from(owned.problem, u)
                                               : path_reach_from(owned.problem, u, budget);
    if (!((r & s) - VertexSet::of({u})).empty()) return false;
  }
  return true;
}

bool is_absorbent(const ColouredMultidigraph& d, VertexSet s, Semantics sem, std::uint64_t budget) {
  const auto owned = reach_problem(d);
  for (int v : (VertexSet::full(d.vertex_count()) - s).indices()) {
    const VertexSet r = sem == Semantics::Walk ? walk_reach_from(owned.problem, v)
                                               : path_reach_from(owned.problem, v, budget);
    if ((r & s).empty()) return false;
  }
  return true;
}

bool is_kernel(const ColouredMultidigraph& d, VertexSet s, Semantics sem, std::uint64_t budget) {
  return is_independent(d, s, sem, budget) && is_absorbent(d, s, sem, budget);
}

bool is_independent_H_absorbent(const ColouredMultidigraph& d, VertexSet s, std::uint64_t budget) {
  const auto adj = d.underlying_out();
  for (int u : s.indices()) {
    if (!(adj[u] & s).empty()) return false;
  }
  return is_absorbent(d, s, Semantics::Path, budget);
}

std::optional<VertexSet> kernel_of_plain_digraph(const ReachDigraph& r) {
  std::vector<VertexSet> absorb = r.out;
  for (int v = 0; v < r.vertex_count(); ++v) absorb[v].erase(v);
  const auto conflict = symmetric_conflict(absorb);
  return least_independent_absorbent(AbsorbentProblem{r.vertex_count(), conflict, absorb});
}

KernelReport find_kernel(const ColouredMultidigraph& d, Semantics sem, std::uint64_t budget) {
  ReachDigraph r;
  try {
    r = reach_digraph(d, sem, budget);
  } catch (const BudgetExceeded& e) {
    KernelReport rep;
    rep.status = KernelStatus::Unknown;
    rep.budget = e.budget();
    return rep;
  }
  const auto conflict = symmetric_conflict(r.out);
  auto rep = solve_report(AbsorbentProblem{r.vertex_count(), conflict, r.out});
  if (rep.witness && !is_kernel(d, *rep.witness, sem, budget)) {
    throw Error(ErrorCode::Internal, "kernel witness failed self-check");
  }
  return rep;
}

KernelReport find_independent_H_absorbent(const ColouredMultidigraph& d, std::uint64_t budget) {
  std::vector<VertexSet> absorb;
  try {
    absorb = reach_digraph(d, Semantics::Path, budget).out;
  } catch (const BudgetExceeded& e) {
    KernelReport rep;
    rep.status = KernelStatus::Unknown;
    rep.budget = e.budget();
    return rep;
  }
  const auto conflict = symmetric_conflict(d.underlying_out());
  auto rep = solve_report(AbsorbentProblem{d.vertex_count(), conflict, absorb});
  if (rep.witness && !is_independent_H_absorbent(d, *rep.witness, budget)) {
    throw Error(ErrorCode::Internal, "independent absorbent witness failed self-check");
  }
  return rep;
}

std::vector<std::vector<int>> strong_components(std::span<const VertexSet> out) {
  const int n = static_cast<int>(out.size());
  std::vector<VertexSet> reach(n);
  for (int s = 0; s < n; ++s) {
    VertexSet seen = VertexSet::of({s});
    VertexSet frontier = seen;
    while (!frontier.empty()) {
      VertexSet next;
      for (int v : frontier.indices()) next = next | out[v];
      frontier = next - seen;
      seen = seen | next;
    }
    reach[s] = seen;
  }
  std::vector<VertexSet> comps;
  VertexSet assigned;
  for (int v = 0; v < n; ++v) {
    if (assigned.contains(v)) continue;
    VertexSet c;
    for (int u = 0; u < n; ++u) {
      if (reach[v].contains(u) && reach[u].contains(v)) c.insert(u);
    }
    comps.push_back(c);
    assigned = assigned | c;
  }
  std::vector<std::vector<int>> ordered;
  VertexSet removed;
  std::vector<bool> used(comps.size(), false);
  for (std::size_t round = 0; round < comps.size(); ++round) {
    for (std::size_t i = 0; i < comps.size(); ++i) {
      if (used[i]) continue;
      bool initial = true;
      for (int u = 0; u < n && initial; ++u) {
        if (removed.contains(u) || comps[i].contains(u)) continue;
        if (!(out[u] & comps[i]).empty()) initial = false;
      }
      if (!initial) continue;
      used[i] = true;
      removed = removed | comps[i];
      ordered.push_back(comps[i].indices());
      break;
    }
  }
  return ordered;
}

VertexSet constructive_b2_set(const ColouredMultidigraph& d, std::uint64_t budget) {
  const Pattern& h = d.pattern();
  const auto analysis = analyse_b2(h);
  if (!analysis.member) {
    throw Error(ErrorCode::OddCycleInComplement,
                analysis.reason == B2Reason::NotReflexive
                    ? "pattern is not reflexive"
                    : "complement of the pattern contains an odd cycle");
  }
  const Pattern hc = complement(h);
  std::vector<VertexSet> hc_rows(h.size());
  for (int c = 0; c < h.size(); ++c) hc_rows[c] = VertexSet(hc.out_row(c));
  const auto layers = strong_components(hc_rows);

  std::vector<int> current;
  for (int v = 0; v < d.vertex_count(); ++v) current.push_back(v);

  // The last layer dominates every earlier one in the pattern, so it is handled first.
  for (auto it = layers.rbegin(); it != layers.rend(); ++it) {
    const auto& layer = *it;
    std::uint32_t layer_mask = 0;
    for (int c : layer) layer_mask |= 1U << c;
    // Two-colour the layer's complement arcs (ignoring direction).
    std::uint32_t part1 = 1U << layer.front();
    std::uint32_t part2 = 0;
    std::vector<int> stack{layer.front()};
    while (!stack.empty()) {
      const int x = stack.back();
      stack.pop_back();
      const bool in1 = (part1 >> x) & 1U;
      const std::uint32_t nb = (hc.out_row(x) | hc.in_row(x)) & layer_mask;
      for (std::uint32_t row = nb; row; row &= row - 1) {
        const int y = std::countr_zero(row);
        const std::uint32_t& same = in1 ? part1 : part2;
        std::uint32_t& other = in1 ? part2 : part1;
        if ((same >> y) & 1U) throw Error(ErrorCode::Internal, "layer of the complement is not bipartite");
        if (!((other >> y) & 1U)) {
          other |= 1U << y;
          stack.push_back(y);
        }
      }
    }

    const int k = static_cast<int>(current.size());
    const auto mat = restricted_matrix(d, current, layer_mask);
    const auto adj = rows_of_matrix(mat, k);
    VertexSet chosen;
    if (part2 == 0) {
      // Complete reflexive layer: paths are plain paths; take one vertex per terminal component.
      for (const auto& comp : strong_components(adj)) {
        VertexSet cs;
        for (int v : comp) cs.insert(v);
        bool terminal = true;
        for (int v : comp) terminal = terminal && (adj[v] - cs).empty();
        if (terminal) chosen.insert(comp.front());
      }
    } else {
      // Two complete reflexive parts with no transitions between them.
      std::vector<std::uint32_t> trans(h.size(), 0);
      for (int c = 0; c < h.size(); ++c) {
        if ((part1 >> c) & 1U) trans[c] = part1;
        if ((part2 >> c) & 1U) trans[c] = part2;
      }
      const ReachProblem rp{k, h.size(), mat, trans};
      const auto absorb = path_closure(rp, budget);
      const auto conflict = symmetric_conflict(adj);
      auto found = least_independent_absorbent(AbsorbentProblem{k, conflict, absorb});
      if (!found) throw Error(ErrorCode::Internal, "two-part layer without an independent absorbent set");
      chosen = *found;
    }
    std::vector<int> next;
    for (int i : chosen.indices()) next.push_back(current[i]);
    current = std::move(next);
  }
  VertexSet result;
  for (int v : current) result.insert(v);
  if (!is_independent_H_absorbent(d, result, budget)) {
    throw Error(ErrorCode::Internal, "constructed set failed verification");
  }
  return result;
}

}  // namespace hkernel
