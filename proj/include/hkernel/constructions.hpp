#pragma once

#include "hkernel/coloured_digraph.hpp"
#include "hkernel/pattern.hpp"
#include "hkernel/pattern_class.hpp"

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hkernel {

enum class GadgetKind { F4, F5, F1Simplify, LinearSum };
std::string_view gadget_kind_name(GadgetKind k);

/// How a derived digraph relates to the one it was built from.
struct GadgetMap {
  GadgetKind kind = GadgetKind::F4;
  std::vector<std::string> original_vertices;
  std::vector<std::string> derived_vertices;
  /// F4/F5: (s, hat s) for every middle vertex s.
  std::vector<std::pair<std::string, std::string>> hats;
  /// F1Simplify: first and second new vertex of each replaced pair.
  std::vector<std::string> z1;
  std::vector<std::string> z2;
  /// LinearSum: (vertex of the right operand, its name in the sum).
  std::vector<std::pair<std::string, std::string>> renamed;

  friend bool operator==(const GadgetMap&, const GadgetMap&) = default;
};

std::string serialize_gadget_map(const GadgetMap& m);
GadgetMap parse_gadget_map(std::string_view text);

/// Pulls a kernel of the derived digraph back to the original:
/// F4/F5: (K' plus every s whose hat is in K') minus the hats;
/// F1Simplify: K' restricted to original vertices;
/// LinearSum: K' restricted to the right operand, under its original names.
std::vector<std::string> kernel_pullback(const std::vector<std::string>& k_prime, const GadgetMap& m);

struct LinearSum {
  ColouredMultidigraph digraph;
  GadgetMap map;
};

/// D1 * D2: both operands and every arc from V1 to V2, those coloured c0.
/// Without c0 a fresh colour is added to the pattern as an isolated
/// reflexive colour; a c0 missing from the pattern is added the same way.
/// Right-operand names that clash get primes appended. Throws PatternMismatch
/// if the operands use different patterns.
LinearSum linear_sum_digraphs(const ColouredMultidigraph& d1, const ColouredMultidigraph& d2,
                              const std::optional<std::string>& c0 = std::nullopt);

/// H1 * H2 on disjoint colour sets. Throws DuplicateColour.
Pattern linear_sum_patterns(const Pattern& h1, const Pattern& h2);

/// D^1 = base, D^(j+1) = K1 * D^j, with one cross colour shared by all levels.
/// Throws InvalidArgument for j < 1.
ColouredMultidigraph linear_sum_family(const ColouredMultidigraph& base, int j);

/// The odd cycle x0 .. x2k with arc (x_i, x_i+1) coloured cycle[i]. The cycle
/// lists colours of an odd directed cycle of the complement (a repeated first
/// colour at the end is accepted). Throws NotOddCycle, NotInComplement.
ColouredMultidigraph odd_cycle_witness(const Pattern& h, const std::vector<std::string>& cycle);

/// Three copies s_i, u_i^1 .. u_i^k of the obstruction walk x_0 .. x_k, where
/// s_i reaches s_i+1 along arcs coloured x_0 .. x_k, and each u_i^j has an arc
/// coloured blockers[j-1] to its own sink t_i^j. Paths from s_i cannot use a
/// blocker arc or pass s_i+1, so the sinks leave the s_i as a directed
/// triangle and no path-kernel exists. 3(2k+1) vertices. Throws
/// InvalidArgument unless `w` verifies against `h`.
ColouredMultidigraph obstruction_digraph(const Pattern& h, const ObstructionWitness& w);

/// Patterns of the twin gadgets: `derived` colours the gadget output,
/// `original` = derived plus the arc (x, w) colours the input.
struct GadgetPatterns {
  std::shared_ptr<const Pattern> derived;
  std::shared_ptr<const Pattern> original;
};
/// Loops, x <-> y, y -> z, y -> w, z <-> w. Contracting z, w gives F4.
GadgetPatterns f4_gadget_patterns();
/// Loops, x <-> y, y <-> z, y <-> w, z <-> w. Contracting z, w gives F5.
GadgetPatterns f5_gadget_patterns();

struct Gadget {
  ColouredMultidigraph digraph;
  GadgetMap map;
};

/// For every s entered by an x arc from r and left by a w arc to t != r:
/// a new vertex hat s with arcs s -> hat s (y and w), hat s -> s (y), and
/// hat s -> t (w) for each such t. Colours are matched by name; the input
/// may only use x, y, z, w. Throws UnknownColour.
Gadget gadget_f4(const ColouredMultidigraph& d);
/// As gadget_f4 without the w-coloured s -> hat s arc.
Gadget gadget_f5(const ColouredMultidigraph& d);

/// Removes parallel arcs of an {r, g, b}-coloured multidigraph: duplicates of
/// one colour collapse, a pair carrying r keeps a single r arc, and a pair
/// carrying exactly {g, b} is replaced by u -> v (g), u -> z1 (b),
/// z1 -> z2 (g), z1 -> v (b). Pairs are processed in `pair_order` (pairs
/// (u, v) as vertex indices) or by increasing (u, v). Throws UnknownColour.
Gadget f1_simplify(const ColouredMultidigraph& d,
                   const std::vector<std::pair<int, int>>* pair_order = nullptr);

}  // namespace hkernel
