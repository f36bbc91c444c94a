#pragma once

#include "hkernel/coloured_digraph.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hkernel {

enum class Semantics { Walk, Path };

std::string_view semantics_name(Semantics s);
/// Accepts "walk" or "path". Throws SyntaxError otherwise.
Semantics parse_semantics(std::string_view s);

/// A walk or path in D: vertices x0..xk, arc indices and colours of the k arcs.
struct Trail {
  std::vector<int> vertices;
  std::vector<int> arcs;
  std::vector<int> colours;

  int length() const noexcept { return static_cast<int>(arcs.size()); }
  friend bool operator==(const Trail&, const Trail&) = default;
};

using WalkCertificate = Trail;
using PathCertificate = Trail;

/// Arcs exist in d with the stated colours and consecutive colours are arcs of the pattern.
bool verify_walk(const ColouredMultidigraph& d, const Trail& t);
/// verify_walk plus pairwise-distinct vertices.
bool verify_path(const ColouredMultidigraph& d, const Trail& t);

/// One "tail > head : colour" line per arc.
std::string render_trail(const ColouredMultidigraph& d, const Trail& t);

/// 10^7 unless HKERNEL_BUDGET holds a positive integer.
std::uint64_t default_path_budget();

struct WalkStats {
  std::uint64_t states_expanded = 0;
  std::uint64_t arcs_examined = 0;
};

/// Shortest H-walk from u to v by breadth-first search on (vertex, last colour).
/// Throws SameVertex when u == v.
std::optional<WalkCertificate> walk_reachable(const ColouredMultidigraph& d, int u, int v,
                                              WalkStats* stats = nullptr);
/// Some H-path from u to v. Throws SameVertex, BudgetExceeded.
std::optional<PathCertificate> path_reachable(const ColouredMultidigraph& d, int u, int v,
                                              std::uint64_t budget = default_path_budget());

/// Pairwise reachability between distinct vertices under one semantics.
struct ReachDigraph {
  std::vector<std::string> vertices;
  std::vector<VertexSet> out;
  Semantics semantics = Semantics::Path;

  int vertex_count() const noexcept { return static_cast<int>(out.size()); }
  bool has_arc(int u, int v) const { return out.at(u).contains(v); }
  int arc_count() const;
};

ReachDigraph reach_digraph(const ColouredMultidigraph& d, Semantics s,
                           std::uint64_t budget = default_path_budget());

/// Shortcuts the walk at repeated vertices. Requires a transitive pattern
/// (throws NotTransitive) and a valid walk (throws InvalidCertificate).
PathCertificate extract_path_from_walk(const ColouredMultidigraph& d, const WalkCertificate& w);

/// Index-level input for the closure routines: the n*n matrix of arc-colour
/// masks and, per colour, the mask of colours allowed next.
struct ReachProblem {
  int n = 0;
  int colours = 0;
  std::span<const std::uint32_t> pair_colours;
  std::span<const std::uint32_t> transitions;
};

/// Views into d; d must outlive the result.
struct OwnedReachProblem {
  std::vector<std::uint32_t> transitions;
  ReachProblem problem;
};
OwnedReachProblem reach_problem(const ColouredMultidigraph& d);

VertexSet walk_reach_from(const ReachProblem& p, int source);
/// Throws BudgetExceeded after `budget` state expansions.
VertexSet path_reach_from(const ReachProblem& p, int source, std::uint64_t budget);

std::vector<VertexSet> walk_closure(const ReachProblem& p);
/// The budget applies to each source separately.
std::vector<VertexSet> path_closure(const ReachProblem& p, std::uint64_t budget);
std::vector<VertexSet> closure(const ReachProblem& p, Semantics s, std::uint64_t budget);

}  // namespace hkernel
