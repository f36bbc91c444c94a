#pragma once

#include "hkernel/canonical.hpp"
#include "hkernel/coloured_digraph.hpp"
#include "hkernel/pattern.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace hkernel {

/// Orderly (canonical augmentation by prefix) generation of token matrices.
///
/// Off-diagonal cells are filled in block order: for k = 1..n-1 and j < k,
/// cell (j,k) then (k,j). After each block the induced prefix must already be
/// canonical; since the least encoding of a class has least-encoded prefixes,
/// every class is produced exactly once, in increasing code order.
class OrderlyEnumerator {
public:
  /// `alphabet` must be strictly increasing; `weights[i]` is the arc count of alphabet[i].
  OrderlyEnumerator(int n, std::uint64_t diagonal, std::vector<std::uint64_t> alphabet,
                    std::vector<int> weights);

  int n() const noexcept { return n_; }
  int slot_count() const noexcept { return n_ * (n_ - 1); }
  int max_weight() const noexcept { return max_weight_; }
  /// (row, column) of an off-diagonal slot.
  std::pair<int, int> slot_cell(int slot) const;

  /// Visitor receives the row-major n*n matrix; returning false stops the run.
  using Visitor = std::function<bool(std::span<const std::uint64_t>)>;

  /// Canonical matrices of total weight `m` (any weight when m < 0) whose
  /// first slots equal `prefix` and whose slot sequence is >= `start` (when
  /// non-empty). Returns false if the visitor stopped the run. `rejected`
  /// counts prefixes discarded as non-canonical.
  bool run(int m, std::span<const std::uint64_t> prefix, std::span<const std::uint64_t> start,
           const Visitor& visit, std::uint64_t* rejected = nullptr) const;

  /// Slot prefixes of length `len` that can extend to a canonical matrix of
  /// weight `m` as far as prefix checks can tell, in increasing order.
  std::vector<std::vector<std::uint64_t>> prefixes(int m, int len) const;

private:
  struct Run;

  int n_;
  std::uint64_t diagonal_;
  std::vector<std::uint64_t> alphabet_;
  std::vector<int> weights_;
  int max_weight_ = 0;
  std::vector<std::pair<int, int>> cells_;
  std::vector<int> block_end_;  // block_end_[slot] = k if slot closes block k, else -1
};

/// Per-pair token alphabet for coloured digraphs: per-colour multiplicities
/// up to max_parallel, total up to max_arcs_per_pair, packed as in
/// digraph_tokens. Sorted ascending; weights are total arc counts.
struct PairAlphabet {
  std::vector<std::uint64_t> tokens;
  std::vector<int> weights;
};
PairAlphabet pair_alphabet(int colours, int max_parallel, int max_arcs_per_pair);

/// Canonical reflexive patterns with exactly k colours named a, b, c, ...,
/// in increasing canonical code. Throws BoundTooLarge for k > 5.
std::vector<Pattern> enumerate_patterns_exact(int k);
/// All counts 1..max_colours, ordered by (colour count, canonical code).
std::vector<Pattern> enumerate_patterns(int max_colours);

/// Default vertex names v0, v1, ...
std::vector<std::string> default_vertex_names(int n);

/// Builds the digraph a token matrix describes (arcs ordered by (tail, head, colour)).
ColouredMultidigraph digraph_from_tokens(std::shared_ptr<const Pattern> pattern, int n,
                                         std::span<const std::uint64_t> tokens);

/// One representative per vertex-relabelling class, ordered by (vertex count,
/// arc count, canonical code). Throws BoundTooLarge when the raw space
/// exceeds 10^10 instances.
std::vector<ColouredMultidigraph> enumerate_coloured_digraphs(std::shared_ptr<const Pattern> pattern,
                                                              int max_vertices, int max_parallel);

/// Raw (non-deduplicated) number of digraphs on exactly n vertices.
double raw_digraph_count(int n, const PairAlphabet& alphabet);

inline constexpr double kRawGuard = 1e10;

}  // namespace hkernel
