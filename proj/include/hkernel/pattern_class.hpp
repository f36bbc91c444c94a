#pragma once

#include "hkernel/canonical.hpp"
#include "hkernel/pattern.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace hkernel {

/// (a,b), (b,c) arcs imply (a,c), loops included.
bool is_transitive(const Pattern& p);

/// Canonical reflexive 3-colour patterns that are not transitive; every
/// proper induced subpattern of such a pattern is transitive.
std::vector<Pattern> minimal_nontransitive_family();

/// Some injective colour map sends q onto an induced subpattern of p.
bool contains_induced(const Pattern& p, const Pattern& q);
bool is_free_of(const Pattern& p, const std::vector<Pattern>& family);

/// Some directed cycle of odd length in the complement, as colours
/// x0 .. x2k (the arc x2k -> x0 closes it). Shortest such cycle.
std::optional<std::vector<int>> odd_cycle_in_complement(const Pattern& p);

enum class B2Reason { Member, NotReflexive, OddCycle };

struct B2Analysis {
  bool member = false;
  B2Reason reason = B2Reason::Member;
  std::vector<int> odd_cycle;  // set when reason == OddCycle
};

B2Analysis analyse_b2(const Pattern& p);
/// Reflexive and the complement has no odd cycle.
bool in_B2(const Pattern& p);

/// Unordered pairs (i < j) with equal closed in- and out-neighbourhoods.
/// Throws NotReflexive.
std::vector<std::pair<int, int>> true_twins(const Pattern& p);

/// Merges twin y into x (x keeps its name and position). Throws NotTwins.
Pattern contract_true_twins(const Pattern& p, const std::string& x, const std::string& y);

/// Replaces colour v by k copies v_1..v_k with v's neighbourhood; the copies
/// are joined to each other exactly when v has a loop. k = 1 returns p.
Pattern blow_up(const Pattern& p, const std::string& v, int k);

/// A walk x0..xk in the pattern in which every xj (j < k) misses some
/// out-arc (x_j, c_j), closed by the missing arc (x_k, x_0). Such a walk
/// rules out kernels by paths for some coloured digraph.
struct ObstructionWitness {
  std::vector<int> walk;
  std::vector<int> blockers;
  std::pair<int, int> closing{0, 0};
};

bool verify_obstruction(const Pattern& p, const ObstructionWitness& w);
/// Shortest witness, lowest start colour first.
std::optional<ObstructionWitness> find_obstruction(const Pattern& p);

enum class Panchromatic { Yes, No, OpenF1 };
std::string_view panchromatic_name(Panchromatic p);

struct StructuralVerdict {
  bool yes = false;
  bool not_reflexive = false;
  std::uint32_t part1 = 0;  // V1, the dominating part
  std::uint32_t part2 = 0;
  int arrangement = 0;      // 1 no cross arcs, 2 all forward no back, 3 all forward any back
};

/// Two-part test: V1, V2 both complete reflexive (V2 may be empty) joined by
/// (1) no arcs, (2) all V1 -> V2 arcs and none back, or (3) all V1 -> V2 arcs
/// and any back arcs; (3) is allowed only when `f1_is_panchromatic`.
/// The reported split has the least arrangement, then the least V1 mask.
StructuralVerdict structural_panchromatic(const Pattern& p, bool f1_is_panchromatic);

struct CatalogueEntry {
  Pattern pattern;
  CanonicalCode code;
  std::vector<std::string> names;
  bool transitive = false;
  bool in_b2 = false;
  Panchromatic panchromatic_by_paths = Panchromatic::No;
  std::string evidence;
  std::optional<ObstructionWitness> obstruction;
};

/// The 16 reflexive 3-colour patterns in increasing canonical code.
std::vector<CatalogueEntry> three_vertex_catalogue();

/// One line per entry: code, names, flags, evidence.
std::string catalogue_table(const std::vector<CatalogueEntry>& entries);

// Named patterns. Colour names follow the usual drawings.

/// r, g, b with every arc except (b, g).
Pattern pattern_f1();
/// x, y, v: loops plus x <-> y and y -> v.
Pattern pattern_f4();
/// x, y, v: loops plus x <-> y and y <-> v.
Pattern pattern_f5();
/// Two reflexive colours with no arc between them.
Pattern pattern_two_isolated();
/// Complete reflexive on u, u', b, g minus (b,u), (g,u'), (b,g), (g,b):
/// odd-cycle-free complement yet not panchromatic by paths.
Pattern pattern_b2_not_b3();

}  // namespace hkernel
