#include "hkernel/search.hpp"

#include "hkernel/enumerate.hpp"
#include "hkernel/error.hpp"
#include "hkernel/kernels.hpp"
#include "hkernel/pattern_class.hpp"
#include "hkernel/reachability.hpp"
#include "hkernel/text_format.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <mutex>
#include <sstream>
#include <thread>

namespace hkernel {

namespace {

using json = nlohmann::json;

constexpr int kStateVersion = 1;
constexpr std::size_t kGroupTasks = 64;
constexpr std::uint64_t kRandomChunk = 256;
constexpr int kPrefixSlots = 6;

enum class Verdict { No, Yes, Unknown };

struct Context {
  SearchTarget target;
  std::vector<std::shared_ptr<const Pattern>> patterns;
  std::vector<std::vector<std::uint32_t>> transitions;
  int packed_colours = 0;  // colours per token in the exhaustive enumeration
  PairAlphabet alphabet;
  std::uint64_t budget = 0;
};

// Same-coloured parallel arcs change no reachability, independence or
// absorption, so each multidigraph is represented by its deduplication: a pair
// carries a set of colours and max_parallel only matters in random mode.
PairAlphabet search_alphabet(const SearchTarget& t) {
  const int packed = t.pattern ? t.pattern->size() : t.bounds.max_colours;
  const int cap = t.bounds.max_arcs_per_pair > 0 ? std::min(t.bounds.max_arcs_per_pair, packed) : packed;
  return pair_alphabet(packed, 1, cap);
}

Context make_context(const SearchTarget& t, const RunOptions& o) {
  Context c;
  c.target = t;
  c.patterns = target_patterns(t);
  for (const auto& p : c.patterns) c.transitions.push_back(p->out_rows());
  c.packed_colours = t.pattern ? t.pattern->size() : t.bounds.max_colours;
  if (t.kind != TargetKind::MinimalNontransitiveMember) c.alphabet = search_alphabet(t);
  c.budget = o.path_budget ? o.path_budget : default_path_budget();
  return c;
}

// Relations as per-vertex sets over the library closures.
struct GenericOps {
  using Rel = std::vector<VertexSet>;
  ReachProblem rp;
  std::uint64_t budget;

  Rel walk() const { return walk_closure(rp); }
  Rel path() const { return path_closure(rp, budget); }
  Rel adjacency() const {
    Rel adj(rp.n);
    for (int u = 0; u < rp.n; ++u) {
      for (int v = 0; v < rp.n; ++v) {
        if (rp.pair_colours[static_cast<std::size_t>(u) * rp.n + v]) adj[u].insert(v);
      }
    }
    return adj;
  }
  bool solution(const Rel& conflict, const Rel& absorb) const {
    const auto sym = symmetric_conflict(conflict);
    return least_independent_absorbent(AbsorbentProblem{rp.n, sym, absorb}).has_value();
  }
};

constexpr int kSmallVertices = 8;
constexpr int kSmallColours = 16;

// Per-colour adjacency rows of an instance with at most 8 vertices.
struct SmallGraph {
  int n = 0;
  std::uint32_t adj[kSmallColours][kSmallVertices] = {};

  SmallGraph(int n_, std::span<const std::uint32_t> pc) : n(n_) {
    for (int u = 0; u < n; ++u) {
      for (int v = 0; v < n; ++v) {
        for (std::uint32_t cs = pc[static_cast<std::size_t>(u) * n + v]; cs; cs &= cs - 1) {
          adj[std::countr_zero(cs)][u] |= 1U << v;
        }
      }
    }
  }
};

// Bit-parallel closures and subset scan for instances with at most 8 vertices.
struct SmallOps {
  using Rel = std::array<std::uint32_t, kSmallVertices>;
  const std::uint32_t (&adj)[kSmallColours][kSmallVertices];
  int n;
  int k;
  std::span<const std::uint32_t> trans;

  SmallOps(const SmallGraph& graph, int k_, std::span<const std::uint32_t> t)
      : adj(graph.adj), n(graph.n), k(k_), trans(t) {}

  std::uint32_t step(int c, std::uint32_t from) const {
    std::uint32_t out = 0;
    for (; from; from &= from - 1) out |= adj[c][std::countr_zero(from)];
    return out;
  }

  Rel walk() const {
    if (n * k <= 64) return walk_by_states();
    Rel r{};
    for (int u = 0; u < n; ++u) {
      std::uint32_t at[kSmallColours];
      for (int c = 0; c < k; ++c) at[c] = adj[c][u];
      for (bool changed = true; changed;) {
        changed = false;
        for (int c = 0; c < k; ++c) {
          std::uint32_t from = 0;
          for (int p = 0; p < k; ++p) {
            if ((trans[p] >> c) & 1U) from |= at[p];
          }
          const std::uint32_t next = at[c] | step(c, from);
          if (next != at[c]) {
            at[c] = next;
            changed = true;
          }
        }
      }
      for (int c = 0; c < k; ++c) r[u] |= at[c];
      r[u] &= ~(1U << u);
    }
    return r;
  }

  // Search of the (vertex, last colour) state graph, one bit per state at
  // position c * n + v.
  Rel walk_by_states() const {
    std::uint64_t row[64];
    for (int c = 0; c < k; ++c) {
      for (int v = 0; v < n; ++v) {
        std::uint64_t out = 0;
        for (std::uint32_t cs = trans[c]; cs; cs &= cs - 1) {
          const int d = std::countr_zero(cs);
          out |= static_cast<std::uint64_t>(adj[d][v]) << (d * n);
        }
        row[c * n + v] = out;
      }
    }
    const std::uint64_t vmask = (std::uint64_t{1} << n) - 1;
    Rel r{};
    for (int u = 0; u < n; ++u) {
      std::uint64_t reach = 0;
      for (int c = 0; c < k; ++c) reach |= static_cast<std::uint64_t>(adj[c][u]) << (c * n);
      for (std::uint64_t frontier = reach; frontier;) {
        std::uint64_t next = 0;
        for (; frontier; frontier &= frontier - 1) next |= row[std::countr_zero(frontier)];
        frontier = next & ~reach;
        reach |= next;
      }
      std::uint64_t vs = 0;
      for (int c = 0; c < k; ++c) vs |= reach >> (c * n);
      r[u] = static_cast<std::uint32_t>(vs & vmask) & ~(1U << u);
    }
    return r;
  }

  Rel path() const {
    struct State {
      int v;
      int c;
      std::uint32_t seen;
    };
    thread_local std::vector<std::uint32_t> stamp;
    thread_local std::uint32_t generation = 0;
    const std::size_t states = static_cast<std::size_t>(n) * k << n;
    if (stamp.size() < states) stamp.assign(states, 0);
    thread_local std::vector<State> stack;
    stack.clear();
    Rel r{};
    const std::uint32_t all = (1U << n) - 1;
    for (int u = 0; u < n; ++u) {
      if (++generation == 0) {
        std::fill(stamp.begin(), stamp.end(), 0);
        generation = 1;
      }
      const std::uint32_t goal = all & ~(1U << u);
      std::uint32_t res = 0;
      auto push = [&](int w, int c, std::uint32_t seen) {
        res |= 1U << w;
        const std::size_t key = ((static_cast<std::size_t>(w) * k + c) << n) | seen;
        if (stamp[key] != generation) {
          stamp[key] = generation;
          stack.push_back({w, c, seen});
        }
      };
      for (int c = 0; c < k; ++c) {
        for (std::uint32_t ws = adj[c][u]; ws; ws &= ws - 1) {
          const int w = std::countr_zero(ws);
          push(w, c, (1U << u) | (1U << w));
        }
      }
      while (!stack.empty() && res != goal) {
        const State s = stack.back();
        stack.pop_back();
        for (std::uint32_t cs = trans[s.c]; cs; cs &= cs - 1) {
          const int c = std::countr_zero(cs);
          for (std::uint32_t ws = adj[c][s.v] & ~s.seen; ws; ws &= ws - 1) {
            const int w = std::countr_zero(ws);
            push(w, c, s.seen | (1U << w));
          }
        }
      }
      stack.clear();
      r[u] = res;
    }
    return r;
  }

  Rel adjacency() const {
    Rel r{};
    for (int c = 0; c < k; ++c) {
      for (int u = 0; u < n; ++u) r[u] |= adj[c][u];
    }
    return r;
  }

  bool solution(const Rel& conflict, const Rel& absorb) const {
    Rel sym = conflict;
    for (int u = 0; u < n; ++u) {
      for (std::uint32_t vs = conflict[u]; vs; vs &= vs - 1) sym[std::countr_zero(vs)] |= 1U << u;
    }
    for (std::uint32_t s = 0; s < (1U << n); ++s) {
      bool ok = true;
      for (int v = 0; v < n && ok; ++v) {
        ok = ((s >> v) & 1U) ? (sym[v] & s) == 0 : (absorb[v] & s) != 0;
      }
      if (ok) return true;
    }
    return false;
  }
};

template <class Ops>
Verdict decide(TargetKind kind, const std::string& custom, const Ops& ops) {
  auto kernel = [&](const typename Ops::Rel& r) { return ops.solution(r, r); };
  switch (kind) {
    case TargetKind::PathKernelNoWalkKernel:
      if (kernel(ops.walk())) return Verdict::No;
      return kernel(ops.path()) ? Verdict::Yes : Verdict::No;
    case TargetKind::WalkKernelNoPathKernel:
      if (!kernel(ops.walk())) return Verdict::No;
      return kernel(ops.path()) ? Verdict::No : Verdict::Yes;
    case TargetKind::NoPathKernel:
      return kernel(ops.path()) ? Verdict::No : Verdict::Yes;
    case TargetKind::NoIndependentAbsorbent:
      return ops.solution(ops.adjacency(), ops.path()) ? Verdict::No : Verdict::Yes;
    case TargetKind::Custom:
      if (custom == "walk-path-gap") return ops.walk() != ops.path() ? Verdict::Yes : Verdict::No;
      return kernel(ops.walk()) ? Verdict::No : Verdict::Yes;
    case TargetKind::MinimalNontransitiveMember:
      break;
  }
  return Verdict::No;
}

Verdict decide_instance(const SearchTarget& t, int n, int k, std::span<const std::uint32_t> pc,
                        std::span<const std::uint32_t> trans, std::uint64_t budget, bool allow_small) {
  if (allow_small && n <= kSmallVertices && k <= kSmallColours) {
    const SmallGraph g(n, pc);
    return decide(t.kind, t.custom, SmallOps(g, k, trans));
  }
  try {
    return decide(t.kind, t.custom, GenericOps{ReachProblem{n, k, pc, trans}, budget});
  } catch (const BudgetExceeded&) {
    return Verdict::Unknown;
  }
}

Verdict evaluate(const Context& ctx, int rank, int n, std::span<const std::uint32_t> pc) {
  return decide_instance(ctx.target, n, ctx.patterns[rank]->size(), pc, ctx.transitions[rank], ctx.budget, true);
}

void pair_matrix_from_tokens(int n, int packed, std::span<const std::uint64_t> tokens,
                             std::vector<std::uint32_t>& pc) {
  for (std::size_t i = 0; i < static_cast<std::size_t>(n) * n; ++i) {
    const std::uint64_t tok = tokens[i];
    pc[i] = 0;
    if (!tok) continue;
    for (int c = 0; c < packed; ++c) {
      if ((tok >> (4 * (packed - 1 - c))) & 15U) pc[i] |= 1U << c;
    }
  }
}

ColouredMultidigraph digraph_from_packed(std::shared_ptr<const Pattern> pattern, int n, int packed,
                                         std::span<const std::uint64_t> tokens) {
  std::vector<Arc> arcs;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const std::uint64_t tok = tokens[static_cast<std::size_t>(i) * n + j];
      for (int c = 0; c < packed && tok; ++c) {
        const int count = static_cast<int>((tok >> (4 * (packed - 1 - c))) & 15U);
        for (int r = 0; r < count; ++r) arcs.push_back({i, j, c});
      }
    }
  }
  return ColouredMultidigraph(std::move(pattern), default_vertex_names(n), std::move(arcs));
}

// Brute force over all subsets, independent of the solver.
bool brute_force_exists(int n, const std::vector<VertexSet>& conflict, const std::vector<VertexSet>& absorb) {
  if (n > 20) return true;  // not attempted; the solver's answer stands
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
    const VertexSet s(bits);
    bool ok = true;
    for (int v = 0; v < n && ok; ++v) {
      if (s.contains(v)) {
        ok = (conflict[v] & s).empty();
      } else {
        ok = !(absorb[v] & s).empty();
      }
    }
    if (ok) return true;
  }
  return false;
}

// Re-verification with the public API only; throws Internal on disagreement.
std::string verify_from_scratch(const SearchTarget& t, const ColouredMultidigraph& d, std::uint64_t budget) {
  std::string tr;
  auto line = [&](const std::string& s) { tr += s + "\n"; };
  auto fail = [&](const std::string& what) {
    throw Error(ErrorCode::Internal, "witness failed re-verification: " + what);
  };
  const int n = d.vertex_count();
  auto kernel_check = [&](Semantics sem, bool want) {
    const auto rep = find_kernel(d, sem, budget);
    line("find_kernel(" + std::string(semantics_name(sem)) + "): " + rep.describe(d));
    const auto r = reach_digraph(d, sem, budget);
    const bool brute = brute_force_exists(n, symmetric_conflict(r.out), r.out);
    line("subset check(" + std::string(semantics_name(sem)) + "): " + (brute ? "some kernel" : "no kernel"));
    const bool found = rep.status == KernelStatus::Found;
    if (rep.status == KernelStatus::Unknown || found != want || brute != want) {
      fail(std::string(semantics_name(sem)) + " kernel");
    }
    if (found && !is_kernel(d, *rep.witness, sem, budget)) fail("kernel witness");
  };
  switch (t.kind) {
    case TargetKind::PathKernelNoWalkKernel:
      kernel_check(Semantics::Path, true);
      kernel_check(Semantics::Walk, false);
      break;
    case TargetKind::WalkKernelNoPathKernel:
      kernel_check(Semantics::Walk, true);
      kernel_check(Semantics::Path, false);
      break;
    case TargetKind::NoPathKernel:
      kernel_check(Semantics::Path, false);
      break;
    case TargetKind::NoIndependentAbsorbent: {
      const auto rep = find_independent_H_absorbent(d, budget);
      line("find_independent_H_absorbent: " + rep.describe(d));
      const auto r = reach_digraph(d, Semantics::Path, budget);
      const bool brute = brute_force_exists(n, symmetric_conflict(d.underlying_out()), r.out);
      line(std::string("subset check: ") + (brute ? "some set" : "no set"));
      if (rep.status != KernelStatus::NoneExists || brute) fail("independent absorbent set");
      break;
    }
    case TargetKind::Custom:
      if (t.custom == "walk-path-gap") {
        bool shown = false;
        for (int u = 0; u < n && !shown; ++u) {
          for (int v = 0; v < n && !shown; ++v) {
            if (u == v) continue;
            auto w = walk_reachable(d, u, v);
            if (!w || path_reachable(d, u, v, budget)) continue;
            line("walk " + d.name(u) + " -> " + d.name(v) + ":");
            tr += render_trail(d, *w);
            line("path " + d.name(u) + " -> " + d.name(v) + ": none");
            shown = true;
          }
        }
        if (!shown) fail("walk-path gap");
      } else {
        kernel_check(Semantics::Walk, false);
      }
      break;
    case TargetKind::MinimalNontransitiveMember: {
      const Pattern& p = d.pattern();
      line(std::string("is_transitive: ") + (is_transitive(p) ? "yes" : "no"));
      bool minimal = true;
      for (std::uint32_t mask = 1; mask < p.all_colours(); ++mask) {
        if ((mask & p.all_colours()) == mask && mask != p.all_colours() &&
            !is_transitive(induced_subpattern(p, mask))) {
          minimal = false;
        }
      }
      line(std::string("proper induced subpatterns transitive: ") + (minimal ? "yes" : "no"));
      if (is_transitive(p) || !minimal || !is_reflexive(p)) fail("minimal non-transitive member");
      break;
    }
  }
  return tr;
}

std::string bounds_line(const SearchBounds& b) {
  return "vertices=" + std::to_string(b.min_vertices) + ".." + std::to_string(b.max_vertices) +
         " colours<=" + std::to_string(b.max_colours) + " parallel<=" + std::to_string(b.max_parallel) +
         " arcs-per-pair<=" + (b.max_arcs_per_pair > 0 ? std::to_string(b.max_arcs_per_pair) : "-");
}

Witness make_witness(const Context& ctx, int rank, ColouredMultidigraph d, const std::string& position) {
  Witness w;
  w.pattern = ctx.patterns[rank];
  w.pattern_code = canonical_code(*w.pattern);
  w.digraph_code = canonical_code(d);
  std::string tr;
  tr += "target: " + target_to_json(ctx.target) + "\n";
  tr += "position: " + position + "\n";
  tr += "pattern-code: " + w.pattern_code.hex() + "\n";
  tr += "digraph-code: " + w.digraph_code.hex() + "\n";
  tr += verify_from_scratch(ctx.target, d, ctx.budget);
  tr += "verdict: witness re-verified\n";
  w.transcript = std::move(tr);
  w.digraph = std::move(d);
  return w;
}

std::string now_utc() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string certificate_text(const SearchState& s) {
  std::string out = "none-in-bounds\n";
  out += "target: " + target_to_json(s.target) + "\n";
  out += "bounds: " + bounds_line(s.target.bounds) + "\n";
  out += "instances-tested: " + std::to_string(s.stats.instances_tested) + "\n";
  out += "digraph-classes: " + std::to_string(s.stats.digraph_classes) + "\n";
  out += "unknown: " + std::to_string(s.stats.unknown) + "\n";
  out += std::string("clean: ") + (s.stats.unknown == 0 ? "yes" : "no") + "\n";
  return out;
}

struct TaskResult {
  SearchStats stats;
  bool found = false;
  int rank = 0;
  int n = 0;
  std::vector<std::uint64_t> tokens;  // exhaustive
  std::uint64_t index = 0;            // random
  bool aborted = false;               // stop flag seen mid-task; result discarded
};

// Runs tasks [0, count) on up to `workers` threads; results by task index.
template <class F>
std::vector<TaskResult> run_tasks(std::size_t count, int workers, F&& task) {
  std::vector<TaskResult> results(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        results[i] = task(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int threads = std::max(1, std::min<int>(workers, static_cast<int>(count)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

class Driver {
public:
  Driver(SearchState state, const RunOptions& o) : state_(std::move(state)), opts_(o) {
    state_.target.validate();
    ctx_ = make_context(state_.target, o);
  }

  SearchOutcome run() {
    if (state_.cursor.finished) return finish_none();
    switch (state_.target.kind) {
      case TargetKind::MinimalNontransitiveMember: return run_patterns();
      default: return state_.target.mode.random ? run_random() : run_exhaustive();
    }
  }

private:
  bool should_interrupt() const {
    if (opts_.stop && opts_.stop->load()) return true;
    return opts_.max_instances > 0 && state_.stats.instances_tested >= opts_.max_instances;
  }

  void checkpoint() {
    state_.checkpoint_time = now_utc();
    if (opts_.state_path) write_text_file(*opts_.state_path, state_to_json(state_));
    if (opts_.progress) opts_.progress(state_);
  }

  SearchOutcome interrupted() {
    checkpoint();
    SearchOutcome o;
    o.status = SearchStatus::Interrupted;
    o.state = state_;
    return o;
  }

  SearchOutcome finish_none() {
    state_.cursor.finished = true;
    checkpoint();
    SearchOutcome o;
    o.status = SearchStatus::NoneInBounds;
    o.state = state_;
    o.certificate = certificate_text(state_);
    return o;
  }

  SearchOutcome finish_witness(Witness w) {
    state_.cursor.finished = true;
    checkpoint();
    SearchOutcome o;
    o.status = SearchStatus::WitnessFound;
    o.witness = std::move(w);
    o.state = state_;
    return o;
  }

  SearchOutcome run_patterns() {
    // Cursor.task indexes the pattern list.
    for (std::uint64_t i = state_.cursor.task; i < ctx_.patterns.size(); ++i) {
      if (should_interrupt()) return interrupted();
      const Pattern& p = *ctx_.patterns[i];
      ++state_.stats.instances_tested;
      state_.cursor.task = i + 1;
      bool minimal = !is_transitive(p);
      for (std::uint32_t mask = 1; minimal && mask < p.all_colours(); ++mask) {
        if (!is_transitive(induced_subpattern(p, mask))) minimal = false;
      }
      if (minimal) {
        ColouredMultidigraph empty(ctx_.patterns[i], {}, {});
        return finish_witness(make_witness(ctx_, static_cast<int>(i), std::move(empty),
                                           "pattern-rank=" + std::to_string(i)));
      }
    }
    return finish_none();
  }

  TaskResult exhaustive_task(const OrderlyEnumerator& e, int m, const std::vector<std::uint64_t>& prefix) const {
    TaskResult r;
    const int n = e.n();
    const int packed = ctx_.packed_colours;
    std::vector<std::uint32_t> pc(static_cast<std::size_t>(n) * n);
    e.run(m, prefix, {}, [&](std::span<const std::uint64_t> mat) {
      if ((r.stats.digraph_classes & 0xFFF) == 0 && opts_.stop && opts_.stop->load()) {
        r.aborted = true;
        return false;
      }
      ++r.stats.digraph_classes;
      pair_matrix_from_tokens(n, packed, mat, pc);
      std::uint32_t used = 0;
      for (auto c : pc) used |= c;
      // Over a pattern range, an instance whose colours are not exactly
      // 0..k-1 is a recolouring of one on a smaller pattern, which is visited
      // under that pattern.
      const int used_count = std::popcount(used);
      if (!ctx_.target.pattern && used != (1U << used_count) - 1) return true;
      const int want = std::max(1, used_count);
      std::optional<SmallGraph> small;
      if (n <= kSmallVertices) small.emplace(n, pc);
      for (std::size_t rank = 0; rank < ctx_.patterns.size(); ++rank) {
        const int k = ctx_.patterns[rank]->size();
        if (!ctx_.target.pattern && k != want) continue;
        ++r.stats.instances_tested;
        const Verdict v = small ? decide(ctx_.target.kind, ctx_.target.custom,
                                         SmallOps(*small, k, ctx_.transitions[rank]))
                                : evaluate(ctx_, static_cast<int>(rank), n, pc);
        if (v == Verdict::Unknown) ++r.stats.unknown;
        if (v == Verdict::Yes) {
          r.found = true;
          r.rank = static_cast<int>(rank);
          r.n = n;
          r.tokens.assign(mat.begin(), mat.end());
          return false;
        }
      }
      return true;
    }, &r.stats.dedup_pruned);
    return r;
  }

  SearchOutcome run_exhaustive() {
    const SearchTarget& t = state_.target;
    if (!opts_.allow_large && raw_space(t) > kRawGuard) {
      throw Error(ErrorCode::BoundTooLarge,
                  "raw search space exceeds 10^10 instances; use random mode or force");
    }
    if (state_.cursor.n < t.bounds.min_vertices) state_.cursor = {t.bounds.min_vertices, 0, 0, false};
    for (; state_.cursor.n <= t.bounds.max_vertices; ++state_.cursor.n, state_.cursor.m = 0) {
      const int n = state_.cursor.n;
      const OrderlyEnumerator e(n, 0, ctx_.alphabet.tokens, ctx_.alphabet.weights);
      const int max_m = e.slot_count() * e.max_weight();
      for (; state_.cursor.m <= max_m; ++state_.cursor.m, state_.cursor.task = 0) {
        const int m = state_.cursor.m;
        const auto prefixes = e.prefixes(m, std::min(kPrefixSlots, e.slot_count()));
        while (state_.cursor.task < prefixes.size()) {
          if (should_interrupt()) return interrupted();
          const std::size_t first = state_.cursor.task;
          const std::size_t count = std::min(kGroupTasks, prefixes.size() - first);
          auto results = run_tasks(count, opts_.workers,
                                   [&](std::size_t i) { return exhaustive_task(e, m, prefixes[first + i]); });
          // A stopped group is redone as a whole on resume.
          if (std::any_of(results.begin(), results.end(), [](const TaskResult& r) { return r.aborted; })) {
            return interrupted();
          }
          for (std::size_t i = 0; i < count; ++i) {
            state_.stats.add(results[i].stats);
            if (results[i].found) {
              state_.cursor.task = first + i + 1;
              auto d = digraph_from_packed(ctx_.patterns[results[i].rank], n, ctx_.packed_colours,
                                           results[i].tokens);
              const std::string pos = "n=" + std::to_string(n) + " m=" + std::to_string(m) +
                                      " pattern-rank=" + std::to_string(results[i].rank);
              return finish_witness(make_witness(ctx_, results[i].rank, std::move(d), pos));
            }
          }
          state_.cursor.task = first + count;
          checkpoint();
        }
      }
    }
    return finish_none();
  }

  SearchOutcome run_random() {
    const std::uint64_t total = state_.target.mode.count;
    const std::uint64_t chunks = (total + kRandomChunk - 1) / kRandomChunk;
    while (state_.cursor.task < chunks) {
      if (should_interrupt()) return interrupted();
      const std::uint64_t first = state_.cursor.task;
      const std::size_t count = static_cast<std::size_t>(std::min<std::uint64_t>(kGroupTasks, chunks - first));
      auto results = run_tasks(count, opts_.workers, [&](std::size_t i) {
        TaskResult r;
        const std::uint64_t lo = (first + i) * kRandomChunk;
        const std::uint64_t hi = std::min(total, lo + kRandomChunk);
        for (std::uint64_t idx = lo; idx < hi; ++idx) {
          auto inst = random_instance(state_.target, idx);
          ++r.stats.digraph_classes;
          ++r.stats.instances_tested;
          const auto pcs = inst.digraph.pair_colour_matrix();
          const Verdict v = evaluate(ctx_, inst.pattern_rank, inst.digraph.vertex_count(), pcs);
          if (v == Verdict::Unknown) ++r.stats.unknown;
          if (v == Verdict::Yes) {
            r.found = true;
            r.rank = inst.pattern_rank;
            r.index = idx;
            break;
          }
        }
        return r;
      });
      for (std::size_t i = 0; i < count; ++i) {
        state_.stats.add(results[i].stats);
        if (results[i].found) {
          state_.cursor.task = first + i + 1;
          auto inst = random_instance(state_.target, results[i].index);
          return finish_witness(make_witness(ctx_, inst.pattern_rank, std::move(inst.digraph),
                                             "random-index=" + std::to_string(results[i].index)));
        }
      }
      state_.cursor.task = first + count;
      checkpoint();
    }
    return finish_none();
  }

  SearchState state_;
  RunOptions opts_;
  Context ctx_;
};

json bounds_json(const SearchBounds& b) {
  return json{{"min_vertices", b.min_vertices},
              {"max_vertices", b.max_vertices},
              {"max_colours", b.max_colours},
              {"max_parallel", b.max_parallel},
              {"max_arcs_per_pair", b.max_arcs_per_pair}};
}

json target_json(const SearchTarget& t) {
  json j{{"kind", target_kind_name(t.kind)},
         {"bounds", bounds_json(t.bounds)},
         {"mode", t.mode.random ? json{{"random", true}, {"seed", t.mode.seed}, {"count", t.mode.count}}
                                : json{{"random", false}}}};
  if (t.pattern) j["pattern"] = serialize_pattern(*t.pattern);
  if (!t.custom.empty()) j["custom"] = t.custom;
  return j;
}

SearchTarget target_of_json(const json& j) {
  SearchTarget t;
  t.kind = parse_target_kind(j.at("kind").get<std::string>());
  const auto& b = j.at("bounds");
  t.bounds.min_vertices = b.at("min_vertices").get<int>();
  t.bounds.max_vertices = b.at("max_vertices").get<int>();
  t.bounds.max_colours = b.at("max_colours").get<int>();
  t.bounds.max_parallel = b.at("max_parallel").get<int>();
  t.bounds.max_arcs_per_pair = b.at("max_arcs_per_pair").get<int>();
  const auto& m = j.at("mode");
  t.mode.random = m.at("random").get<bool>();
  if (t.mode.random) {
    t.mode.seed = m.at("seed").get<std::uint64_t>();
    t.mode.count = m.at("count").get<std::uint64_t>();
  }
  if (j.contains("pattern")) {
    t.pattern = std::make_shared<const Pattern>(parse_pattern(j.at("pattern").get<std::string>()));
  }
  if (j.contains("custom")) t.custom = j.at("custom").get<std::string>();
  return t;
}

}  // namespace

std::optional<bool> target_holds(const SearchTarget& target, const ColouredMultidigraph& d,
                                 std::uint64_t budget, bool small_path) {
  const auto pc = d.pair_colour_matrix();
  const auto trans = d.pattern().out_rows();
  const Verdict v = decide_instance(target, d.vertex_count(), d.pattern().size(), pc, trans, budget, small_path);
  if (v == Verdict::Unknown) return std::nullopt;
  return v == Verdict::Yes;
}

std::string_view target_kind_name(TargetKind k) {
  switch (k) {
    case TargetKind::PathKernelNoWalkKernel: return "path-kernel-no-walk-kernel";
    case TargetKind::WalkKernelNoPathKernel: return "walk-kernel-no-path-kernel";
    case TargetKind::NoPathKernel: return "no-path-kernel";
    case TargetKind::NoIndependentAbsorbent: return "no-independent-absorbent";
    case TargetKind::MinimalNontransitiveMember: return "minimal-nontransitive-member";
    case TargetKind::Custom: return "custom";
  }
  return "?";
}

TargetKind parse_target_kind(std::string_view s) {
  for (auto k : {TargetKind::PathKernelNoWalkKernel, TargetKind::WalkKernelNoPathKernel,
                 TargetKind::NoPathKernel, TargetKind::NoIndependentAbsorbent,
                 TargetKind::MinimalNontransitiveMember, TargetKind::Custom}) {
    if (target_kind_name(k) == s) return k;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown search target '" + std::string(s) + "'");
}

const std::vector<std::string>& custom_predicates() {
  static const std::vector<std::string> ids = {"walk-path-gap", "no-walk-kernel"};
  return ids;
}

void SearchTarget::validate() const {
  auto bad = [](const std::string& m) { throw Error(ErrorCode::InvalidArgument, m); };
  const bool fixed = kind == TargetKind::NoPathKernel || kind == TargetKind::NoIndependentAbsorbent;
  if (fixed && !pattern) bad("this target needs a pattern");
  if (kind == TargetKind::Custom &&
      std::find(custom_predicates().begin(), custom_predicates().end(), custom) == custom_predicates().end()) {
    bad("unknown custom predicate '" + custom + "'");
  }
  if (bounds.min_vertices < 1 || bounds.max_vertices < bounds.min_vertices) bad("vertex bounds must satisfy 1 <= min <= max");
  if (bounds.max_vertices > ColouredMultidigraph::kMaxVertices) bad("at most 64 vertices");
  if (bounds.max_parallel < 1 || bounds.max_parallel > 15) bad("max parallel must be in 1..15");
  if (bounds.max_arcs_per_pair < 0) bad("max arcs per pair must be non-negative");
  if (pattern) {
    if (pattern->size() < 1 || pattern->size() > 16) bad("pattern must have 1..16 colours");
  } else if (bounds.max_colours < 1 || bounds.max_colours > 5) {
    bad("max colours must be in 1..5");
  }
  if (mode.random && mode.count == 0) bad("random mode needs a positive count");
}

double raw_space(const SearchTarget& t) {
  const auto patterns = target_patterns(t);
  if (t.kind == TargetKind::MinimalNontransitiveMember) return static_cast<double>(patterns.size());
  const auto alphabet = search_alphabet(t);
  double raw = 0;
  for (int n = t.bounds.min_vertices; n <= t.bounds.max_vertices; ++n) raw += raw_digraph_count(n, alphabet);
  return raw * static_cast<double>(patterns.size());
}

void SearchStats::add(const SearchStats& o) {
  instances_tested += o.instances_tested;
  digraph_classes += o.digraph_classes;
  dedup_pruned += o.dedup_pruned;
  unknown += o.unknown;
}

std::string_view search_status_name(SearchStatus s) {
  switch (s) {
    case SearchStatus::WitnessFound: return "witness-found";
    case SearchStatus::NoneInBounds: return "none-in-bounds";
    case SearchStatus::Interrupted: return "interrupted";
  }
  return "?";
}

std::vector<std::shared_ptr<const Pattern>> target_patterns(const SearchTarget& t) {
  if (t.pattern) return {t.pattern};
  std::vector<std::shared_ptr<const Pattern>> out;
  for (auto& p : enumerate_patterns(t.bounds.max_colours)) out.push_back(std::make_shared<const Pattern>(std::move(p)));
  return out;
}

SearchState initial_state(const SearchTarget& target) {
  target.validate();
  SearchState s;
  s.target = target;
  return s;
}

SearchOutcome run_search(const SearchTarget& target, const RunOptions& options) {
  return Driver(initial_state(target), options).run();
}

SearchOutcome resume_search(const SearchState& state, const RunOptions& options) {
  return Driver(state, options).run();
}

SearchOutcome run_subdigraph_search(const SearchTarget& target, const ColouredMultidigraph& base,
                                    const RunOptions& options) {
  target.validate();
  if (target.kind == TargetKind::MinimalNontransitiveMember) {
    throw Error(ErrorCode::InvalidArgument, "subdigraph search needs a digraph-level target");
  }
  if (target.pattern && !(*target.pattern == base.pattern())) {
    throw Error(ErrorCode::PatternMismatch, "base digraph is not coloured by the target pattern");
  }
  const ColouredMultidigraph simple = base.dedupe();
  const auto& arcs = simple.arcs();
  const int m = static_cast<int>(arcs.size());
  if (m > 30) throw Error(ErrorCode::BoundTooLarge, "subdigraph search over more than 30 arcs");
  Context ctx;
  ctx.target = target;
  ctx.patterns = {base.pattern_ptr()};
  ctx.budget = options.path_budget ? options.path_budget : default_path_budget();
  SearchOutcome out;
  out.state = initial_state(target);
  auto& stats = out.state.stats;
  auto subdigraph = [&](std::uint64_t mask) {
    std::vector<Arc> sub;
    for (int i = 0; i < m; ++i)
      if ((mask >> i) & 1U) sub.push_back(arcs[i]);
    return ColouredMultidigraph(base.pattern_ptr(), simple.vertices(), std::move(sub));
  };
  for (int size = 0; size <= m; ++size) {
    const std::uint64_t top = std::uint64_t{1} << m;
    // Gosper's hack: masks with `size` bits in increasing order.
    for (std::uint64_t mask = (std::uint64_t{1} << size) - 1; mask < top;) {
      if (options.stop && options.stop->load()) {
        out.status = SearchStatus::Interrupted;
        return out;
      }
      ++stats.instances_tested;
      ++stats.digraph_classes;
      const auto d = subdigraph(mask);
      const auto holds = target_holds(target, d, ctx.budget);
      if (!holds) {
        ++stats.unknown;
      } else if (*holds) {
        std::vector<int> index(d.vertex_count(), -1);
        std::vector<std::string> kept;
        for (const auto& a : d.arcs()) index[a.tail] = index[a.head] = 0;
        for (int v = 0; v < d.vertex_count(); ++v) {
          if (index[v] < 0) continue;
          index[v] = static_cast<int>(kept.size());
          kept.push_back(d.name(v));
        }
        std::vector<Arc> named;
        for (const auto& a : d.arcs()) named.push_back({index[a.tail], index[a.head], a.colour});
        ColouredMultidigraph trimmed(base.pattern_ptr(), kept, std::move(named));
        const auto still = target_holds(target, trimmed, ctx.budget);
        std::ostringstream pos;
        pos << "subdigraph arcs=" << size << " mask=0x" << std::hex << mask;
        out.status = SearchStatus::WitnessFound;
        out.witness = make_witness(ctx, 0, still && *still ? std::move(trimmed) : d, pos.str());
        out.state.cursor.finished = true;
        return out;
      }
      if (size == 0) break;
      const std::uint64_t c = mask & (~mask + 1);
      const std::uint64_t r = mask + c;
      mask = (((r ^ mask) >> 2) / c) | r;
    }
  }
  out.status = SearchStatus::NoneInBounds;
  out.state.cursor.finished = true;
  out.certificate = certificate_text(out.state);
  return out;
}

void check_state_matches(const SearchState& state, const SearchTarget& target) {
  if (target_to_json(state.target) != target_to_json(target)) {
    throw Error(ErrorCode::StaleState, "checkpoint belongs to a different search target");
  }
}

std::string target_to_json(const SearchTarget& t) { return target_json(t).dump(); }

SearchTarget target_from_json(std::string_view text) {
  try {
    return target_of_json(json::parse(text));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SyntaxError, std::string("bad target document: ") + e.what());
  }
}

std::string state_to_json(const SearchState& s) {
  json j{{"format", "hkernel-search-state"},
         {"version", kStateVersion},
         {"target", target_json(s.target)},
         {"cursor", {{"n", s.cursor.n}, {"m", s.cursor.m}, {"task", s.cursor.task}, {"finished", s.cursor.finished}}},
         {"stats",
          {{"instances_tested", s.stats.instances_tested},
           {"digraph_classes", s.stats.digraph_classes},
           {"dedup_pruned", s.stats.dedup_pruned},
           {"unknown", s.stats.unknown}}},
         {"checkpoint", s.checkpoint_time}};
  return j.dump(2) + "\n";
}

SearchState state_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SyntaxError, std::string("bad state file: ") + e.what());
  }
  if (j.value("format", "") != "hkernel-search-state" || j.value("version", 0) != kStateVersion) {
    throw Error(ErrorCode::StaleState, "state file has an unsupported format or version");
  }
  try {
    SearchState s;
    s.target = target_of_json(j.at("target"));
    const auto& c = j.at("cursor");
    s.cursor = {c.at("n").get<int>(), c.at("m").get<int>(), c.at("task").get<std::uint64_t>(),
                c.at("finished").get<bool>()};
    const auto& st = j.at("stats");
    s.stats.instances_tested = st.at("instances_tested").get<std::uint64_t>();
    s.stats.digraph_classes = st.at("digraph_classes").get<std::uint64_t>();
    s.stats.dedup_pruned = st.at("dedup_pruned").get<std::uint64_t>();
    s.stats.unknown = st.at("unknown").get<std::uint64_t>();
    s.checkpoint_time = j.value("checkpoint", "");
    return s;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SyntaxError, std::string("bad state file: ") + e.what());
  }
}

void write_bundle(const SearchOutcome& outcome, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create '" + dir + "'");
  const std::filesystem::path base(dir);
  std::string status = "status: " + std::string(search_status_name(outcome.status)) + "\n";
  status += "target: " + target_to_json(outcome.state.target) + "\n";
  const auto& s = outcome.state.stats;
  status += "instances-tested: " + std::to_string(s.instances_tested) + "\n";
  status += "digraph-classes: " + std::to_string(s.digraph_classes) + "\n";
  status += "dedup-pruned: " + std::to_string(s.dedup_pruned) + "\n";
  status += "unknown: " + std::to_string(s.unknown) + "\n";
  write_text_file((base / "status.txt").string(), status);
  if (outcome.witness) {
    write_text_file((base / "pattern.pat").string(), serialize_pattern(*outcome.witness->pattern));
    write_text_file((base / "digraph.dg").string(), serialize_digraph(outcome.witness->digraph, "pattern.pat"));
    write_text_file((base / "transcript.txt").string(), outcome.witness->transcript);
  }
  if (outcome.status == SearchStatus::NoneInBounds) {
    write_text_file((base / "certificate.txt").string(), outcome.certificate);
  }
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

RandomInstance random_instance(const SearchTarget& t, std::uint64_t index) {
  const auto patterns = target_patterns(t);
  std::uint64_t key = t.mode.seed;
  std::uint64_t st = splitmix64(key) ^ (index * 0xD1B54A32D192ED03ULL);
  auto unit = [&] { return static_cast<double>(splitmix64(st) >> 11) * 0x1.0p-53; };
  RandomInstance r;
  r.pattern_rank = static_cast<int>(splitmix64(st) % patterns.size());
  const auto& p = patterns[r.pattern_rank];
  const int n = t.bounds.max_vertices;
  const int k = p->size();
  const double density = 0.1 + 0.5 * unit();
  const int cap = t.bounds.max_arcs_per_pair > 0 ? t.bounds.max_arcs_per_pair : k * t.bounds.max_parallel;
  std::vector<Arc> arcs;
  for (int u = 0; u < n; ++u) {
    for (int v = 0; v < n; ++v) {
      if (u == v) continue;
      int placed = 0;
      for (int c = 0; c < k; ++c) {
        if (unit() >= density / std::max(1.0, k / 2.0)) continue;
        const int mult = 1 + static_cast<int>(splitmix64(st) % static_cast<std::uint64_t>(t.bounds.max_parallel));
        for (int i = 0; i < mult && placed < cap; ++i, ++placed) arcs.push_back({u, v, c});
      }
    }
  }
  r.digraph = ColouredMultidigraph(p, default_vertex_names(n), std::move(arcs));
  return r;
}

}  // namespace hkernel
