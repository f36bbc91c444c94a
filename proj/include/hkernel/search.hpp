#pragma once

#include "hkernel/canonical.hpp"
#include "hkernel/coloured_digraph.hpp"
#include "hkernel/pattern.hpp"

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hkernel {

enum class TargetKind {
  PathKernelNoWalkKernel,
  WalkKernelNoPathKernel,
  NoPathKernel,            // fixed pattern
  NoIndependentAbsorbent,  // fixed pattern
  MinimalNontransitiveMember,
  Custom,
};

std::string_view target_kind_name(TargetKind k);
/// Inverse of target_kind_name. Throws InvalidArgument.
TargetKind parse_target_kind(std::string_view s);

/// Custom predicates: "walk-path-gap" (some pair walk- but not path-reachable)
/// and "no-walk-kernel".
const std::vector<std::string>& custom_predicates();

struct SearchBounds {
  int min_vertices = 1;
  int max_vertices = 4;
  /// Pattern colours when the target ranges over patterns.
  int max_colours = 3;
  /// Arcs per ordered pair per colour. Exhaustive runs visit deduplicated
  /// digraphs only, since duplicates change no reachability.
  int max_parallel = 1;
  /// Arcs per ordered pair over all colours; 0 means no extra limit.
  int max_arcs_per_pair = 0;
};

struct SearchMode {
  bool random = false;
  std::uint64_t seed = 0;
  std::uint64_t count = 0;
};

struct SearchTarget {
  TargetKind kind = TargetKind::PathKernelNoWalkKernel;
  std::shared_ptr<const Pattern> pattern;  // NoPathKernel, NoIndependentAbsorbent, optional for Custom
  std::string custom;
  SearchBounds bounds;
  SearchMode mode;

  /// Throws InvalidArgument when fields are inconsistent.
  void validate() const;
};

/// Evaluates the digraph predicate of `target` on one instance; nullopt when
/// the path budget ran out. `small_path` enables the bit-parallel evaluator
/// used for instances with at most 8 vertices.
std::optional<bool> target_holds(const SearchTarget& target, const ColouredMultidigraph& d,
                                 std::uint64_t budget, bool small_path = true);

/// Estimated raw (non-deduplicated) instance count of an exhaustive target.
double raw_space(const SearchTarget& t);

struct SearchStats {
  std::uint64_t instances_tested = 0;   // (pattern, digraph) pairs evaluated
  std::uint64_t digraph_classes = 0;    // canonical digraphs visited
  std::uint64_t dedup_pruned = 0;       // non-canonical prefixes discarded
  std::uint64_t unknown = 0;            // instances with an exceeded path budget

  void add(const SearchStats& o);
  friend bool operator==(const SearchStats&, const SearchStats&) = default;
};

/// Position of the next unprocessed task.
struct SearchCursor {
  int n = 0;
  int m = 0;
  std::uint64_t task = 0;
  bool finished = false;

  friend bool operator==(const SearchCursor&, const SearchCursor&) = default;
};

struct SearchState {
  SearchTarget target;
  SearchCursor cursor;
  SearchStats stats;
  std::string checkpoint_time;
};

struct Witness {
  std::shared_ptr<const Pattern> pattern;
  ColouredMultidigraph digraph;
  CanonicalCode pattern_code;
  CanonicalCode digraph_code;
  std::string transcript;
};

enum class SearchStatus { WitnessFound, NoneInBounds, Interrupted };
std::string_view search_status_name(SearchStatus s);

struct SearchOutcome {
  SearchStatus status = SearchStatus::NoneInBounds;
  std::optional<Witness> witness;
  SearchState state;
  /// For NoneInBounds: the bounds and counts covered; clean iff no unknowns.
  std::string certificate;
  bool clean() const { return status == SearchStatus::NoneInBounds && state.stats.unknown == 0; }
};

struct RunOptions {
  int workers = 1;
  /// Checkpoint file written after every task group and at the end.
  std::optional<std::string> state_path;
  /// Stop (as Interrupted) once at least this many instances were tested; 0 = no limit.
  std::uint64_t max_instances = 0;
  const std::atomic<bool>* stop = nullptr;
  /// Permit exhaustive targets above the 10^10 raw-instance guard.
  bool allow_large = false;
  std::uint64_t path_budget = 0;  // 0 = default_path_budget()
  std::function<void(const SearchState&)> progress;
};

/// State before any instance is processed.
SearchState initial_state(const SearchTarget& target);

/// Exhaustive mode visits instances in order (vertex count, arc count,
/// digraph code, pattern rank) and reports the first witness; random mode
/// draws instance i from a generator keyed by (seed, i) and reports the
/// lowest satisfying i. Witnesses are re-verified from scratch. Throws
/// BoundTooLarge, InvalidArgument.
SearchOutcome run_search(const SearchTarget& target, const RunOptions& options = {});
/// Continues from a checkpoint. Throws StaleState if the state was made by an
/// incompatible format version.
SearchOutcome resume_search(const SearchState& state, const RunOptions& options = {});
/// Throws StaleState unless the state belongs to `target`.
void check_state_matches(const SearchState& state, const SearchTarget& target);

/// Spanning subdigraphs of `base` (deduplicated) in order of arc count, then
/// increasing arc mask; the first satisfying the target's digraph predicate
/// is re-verified, with isolated vertices dropped when the predicate still
/// holds without them. The target must fix `base`'s pattern when it names
/// one. Throws PatternMismatch, InvalidArgument (pattern-level targets),
/// BoundTooLarge (more than 30 arcs).
SearchOutcome run_subdigraph_search(const SearchTarget& target, const ColouredMultidigraph& base,
                                    const RunOptions& options = {});

std::string target_to_json(const SearchTarget& t);
SearchTarget target_from_json(std::string_view text);
std::string state_to_json(const SearchState& s);
SearchState state_from_json(std::string_view text);

/// Directory with pattern.pat, digraph.dg and transcript.txt for a witness,
/// or certificate.txt otherwise. Contents carry no timing information.
void write_bundle(const SearchOutcome& outcome, const std::string& dir);

/// Instance i of a random-mode target: its pattern rank and digraph.
struct RandomInstance {
  int pattern_rank = 0;
  ColouredMultidigraph digraph;
};
RandomInstance random_instance(const SearchTarget& t, std::uint64_t index);

/// Patterns a target ranges over, in rank order.
std::vector<std::shared_ptr<const Pattern>> target_patterns(const SearchTarget& t);

/// SplitMix64 step: advances the state and returns the next output.
std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace hkernel
