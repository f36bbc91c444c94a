#pragma once

#include "hkernel/pattern.hpp"

#include <bit>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace hkernel {

struct Arc {
  int tail = 0;
  int head = 0;
  int colour = 0;

  friend bool operator==(const Arc&, const Arc&) = default;
};

/// Set of vertex indices of a digraph with at most 64 vertices.
class VertexSet {
public:
  constexpr VertexSet() = default;
  constexpr explicit VertexSet(std::uint64_t bits) : bits_(bits) {}

  static VertexSet of(std::initializer_list<int> vs) {
    VertexSet s;
    for (int v : vs) s.insert(v);
    return s;
  }
  static constexpr VertexSet full(int n) {
    return VertexSet(n >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1));
  }

  constexpr std::uint64_t bits() const noexcept { return bits_; }
  constexpr bool contains(int v) const noexcept { return (bits_ >> v) & 1U; }
  constexpr void insert(int v) noexcept { bits_ |= std::uint64_t{1} << v; }
  constexpr void erase(int v) noexcept { bits_ &= ~(std::uint64_t{1} << v); }
  constexpr bool empty() const noexcept { return bits_ == 0; }
  int size() const noexcept { return std::popcount(bits_); }
  std::vector<int> indices() const;

  friend constexpr bool operator==(VertexSet, VertexSet) = default;
  friend constexpr VertexSet operator|(VertexSet a, VertexSet b) { return VertexSet(a.bits_ | b.bits_); }
  friend constexpr VertexSet operator&(VertexSet a, VertexSet b) { return VertexSet(a.bits_ & b.bits_); }
  friend constexpr VertexSet operator-(VertexSet a, VertexSet b) { return VertexSet(a.bits_ & ~b.bits_); }

private:
  std::uint64_t bits_ = 0;
};

/// Loopless multidigraph whose arcs are coloured by the colours of a pattern.
/// Immutable after construction.
class ColouredMultidigraph {
public:
  /// Set-valued queries (reachability closures, kernels) use VertexSet.
  static constexpr int kMaxVertices = 64;

  ColouredMultidigraph() = default;

  /// Validating constructor. Throws LoopArc, UnknownVertex, UnknownColour, DuplicateVertex.
  ColouredMultidigraph(std::shared_ptr<const Pattern> pattern, std::vector<std::string> vertices,
                       std::vector<Arc> arcs);

  const Pattern& pattern() const noexcept { return *pattern_; }
  const std::shared_ptr<const Pattern>& pattern_ptr() const noexcept { return pattern_; }

  int vertex_count() const noexcept { return static_cast<int>(vertices_.size()); }
  const std::vector<std::string>& vertices() const noexcept { return vertices_; }
  const std::string& name(int v) const { return vertices_.at(v); }
  std::optional<int> find(std::string_view name) const;
  /// Throws UnknownVertex.
  int index_of(std::string_view name) const;

  const std::vector<Arc>& arcs() const noexcept { return arcs_; }
  int arc_count() const noexcept { return static_cast<int>(arcs_.size()); }

  /// Bitmask of colours on arcs tail -> head.
  std::uint32_t pair_colours(int tail, int head) const noexcept {
    return pair_colours_[static_cast<std::size_t>(tail) * vertices_.size() + head];
  }
  /// Row-major n*n matrix of pair_colours.
  std::span<const std::uint32_t> pair_colour_matrix() const noexcept { return pair_colours_; }

  /// Number of arcs tail -> head with the given colour.
  int multiplicity(int tail, int head, int colour) const;
  /// Lowest arc index with the given endpoints and colour.
  std::optional<int> find_arc(int tail, int head, int colour) const;

  /// Adjacency of the underlying simple digraph (ignoring colours), as row sets.
  std::vector<VertexSet> underlying_out() const;

  /// Collapses same-coloured parallel duplicates, keeping the first of each.
  ColouredMultidigraph dedupe() const;

  VertexSet names_to_set(const std::vector<std::string>& names) const;
  std::vector<std::string> set_to_names(VertexSet s) const;

private:
  std::shared_ptr<const Pattern> pattern_;
  std::vector<std::string> vertices_;
  std::vector<Arc> arcs_;
  std::vector<std::uint32_t> pair_colours_;
};

ColouredMultidigraph new_coloured_digraph(
    std::vector<std::string> vertices,
    const std::vector<std::tuple<std::string, std::string, std::string>>& arcs,
    std::shared_ptr<const Pattern> pattern);

/// Same pattern contents, vertex names and arc list (in order).
bool same_digraph(const ColouredMultidigraph& a, const ColouredMultidigraph& b);

}  // namespace hkernel
