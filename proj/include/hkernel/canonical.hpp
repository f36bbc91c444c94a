#pragma once

#include "hkernel/coloured_digraph.hpp"
#include "hkernel/pattern.hpp"

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hkernel {

/// Total-order key of an isomorphism class.
///
/// Layout: a kind byte ('P' pattern, 'D' coloured digraph), the vertex count,
/// the colour count, then the least block encoding of the token matrix over
/// all vertex orders. Block k holds token(k,k) followed by token(j,k),
/// token(k,j) for j < k, so the first k blocks depend only on the first k
/// vertices placed.
struct CanonicalCode {
  std::vector<std::uint8_t> bytes;

  std::string hex() const;
  static CanonicalCode from_hex(std::string_view hex);

  friend auto operator<=>(const CanonicalCode&, const CanonicalCode&) = default;
};

/// Row-major n*n token matrix, diagonal included.
struct TokenMatrix {
  int n = 0;
  std::span<const std::uint64_t> tokens;

  std::uint64_t at(int i, int j) const noexcept {
    return tokens[static_cast<std::size_t>(i) * n + j];
  }
};

/// Vertex order (position -> vertex) attaining the least block encoding.
std::vector<int> canonical_order(TokenMatrix m);

/// True iff the identity order already attains the least block encoding.
bool is_canonical_labelling(TokenMatrix m);

/// Tokens of m listed in block order under `order`.
std::vector<std::uint64_t> block_encoding(TokenMatrix m, std::span<const int> order);

/// Pattern token (i,j) is 1 iff (i,j) is an arc.
std::vector<std::uint64_t> pattern_tokens(const Pattern& p);

/// Digraph token (i,j) packs the per-colour arc multiplicities i -> j, one
/// nibble per colour with colour 0 most significant. Needs <= 16 colours and
/// multiplicities <= 15.
std::vector<std::uint64_t> digraph_tokens(const ColouredMultidigraph& d);

/// Code bytes for a token sequence already in block order.
CanonicalCode encode_code(char kind, int n, int colours, std::span<const std::uint64_t> blocks);

/// Patterns are quotiented by colour relabelling.
CanonicalCode canonical_code(const Pattern& p);
/// Coloured digraphs are quotiented by vertex relabelling only; colour names stay fixed.
CanonicalCode canonical_code(const ColouredMultidigraph& d);

/// p with colours reordered canonically; names are kept.
Pattern canonical_relabel(const Pattern& p);

bool isomorphic(const Pattern& a, const Pattern& b);

}  // namespace hkernel
