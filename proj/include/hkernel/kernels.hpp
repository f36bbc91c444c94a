#pragma once

#include "hkernel/coloured_digraph.hpp"
#include "hkernel/reachability.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hkernel {

enum class KernelStatus { Found, NoneExists, Unknown };
std::string_view kernel_status_name(KernelStatus s);

struct KernelReport {
  KernelStatus status = KernelStatus::Unknown;
  std::optional<VertexSet> witness;
  /// Search nodes explored before the verdict (NoneExists: all refuted).
  std::uint64_t nodes = 0;
  /// The path budget that tripped (Unknown only).
  std::uint64_t budget = 0;

  std::string describe(const ColouredMultidigraph& d) const;
};

/// Index-level query: a set K with no `conflict` pair inside it such that
/// every vertex outside K has an `absorb` successor in K. Both are row sets
/// over n vertices; conflict must be symmetric and irreflexive.
struct AbsorbentProblem {
  int n = 0;
  std::span<const VertexSet> conflict;
  std::span<const VertexSet> absorb;
};

/// Least solution in the order where lower vertices are decided "in" first
/// (equivalently: the lexicographically least characteristic vector read
/// from vertex 0 with 1 before 0). `nodes` counts search nodes.
std::optional<VertexSet> least_independent_absorbent(const AbsorbentProblem& p,
                                                     std::uint64_t* nodes = nullptr);
/// Every solution, in the same order. The visitor returns false to stop.
void for_each_independent_absorbent(const AbsorbentProblem& p,
                                    const std::function<bool(VertexSet)>& visit);

/// Symmetric closure of a relation without its diagonal.
std::vector<VertexSet> symmetric_conflict(std::span<const VertexSet> rel);

bool is_independent(const ColouredMultidigraph& d, VertexSet s, Semantics sem,
                    std::uint64_t budget = default_path_budget());
bool is_absorbent(const ColouredMultidigraph& d, VertexSet s, Semantics sem,
                  std::uint64_t budget = default_path_budget());
bool is_kernel(const ColouredMultidigraph& d, VertexSet s, Semantics sem,
               std::uint64_t budget = default_path_budget());

/// Independent in D's underlying digraph and absorbent by H-paths.
bool is_independent_H_absorbent(const ColouredMultidigraph& d, VertexSet s,
                                std::uint64_t budget = default_path_budget());

/// Kernel of a plain digraph given by rows; least witness as above.
std::optional<VertexSet> kernel_of_plain_digraph(const ReachDigraph& r);

KernelReport find_kernel(const ColouredMultidigraph& d, Semantics sem,
                         std::uint64_t budget = default_path_budget());
KernelReport find_independent_H_absorbent(const ColouredMultidigraph& d,
                                          std::uint64_t budget = default_path_budget());

/// Layer-by-layer construction of an independent H-absorbent set for
/// patterns whose complement has no odd cycle. Throws OddCycleInComplement
/// (also for non-reflexive patterns, which never qualify).
VertexSet constructive_b2_set(const ColouredMultidigraph& d,
                              std::uint64_t budget = default_path_budget());

/// Strongly connected components in a topological order of the condensation:
/// each component is initial in what remains after removing the earlier
/// ones; ties go to the component with the lowest member.
std::vector<std::vector<int>> strong_components(std::span<const VertexSet> out);

}  // namespace hkernel
