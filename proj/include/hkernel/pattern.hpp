#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hkernel {

/// A digraph on colours, loops allowed. Arc (a, b) permits an arc coloured a
/// to be followed by an arc coloured b.
///
/// Colours are dense indices into colours(); adjacency is stored as one
/// bitmask row per colour, so a pattern holds at most kMaxColours colours.
class Pattern {
public:
  static constexpr int kMaxColours = 32;

  Pattern() = default;

  /// Validating constructor. Throws UnknownColour / DuplicateColour.
  Pattern(std::vector<std::string> colours,
          const std::vector<std::pair<std::string, std::string>>& arcs);

  /// Builds from index-level data; out_rows[a] has bit b set iff (a, b) is an arc.
  static Pattern from_rows(std::vector<std::string> colours, std::vector<std::uint32_t> out_rows);

  int size() const noexcept { return static_cast<int>(colours_.size()); }
  const std::vector<std::string>& colours() const noexcept { return colours_; }
  const std::string& name(int c) const { return colours_.at(c); }
  std::optional<int> find(std::string_view name) const;
  /// Index of a named colour. Throws UnknownColour.
  int index_of(std::string_view name) const;

  bool has_arc(int a, int b) const noexcept { return (out_[a] >> b) & 1U; }
  std::uint32_t out_row(int c) const noexcept { return out_[c]; }
  std::uint32_t in_row(int c) const noexcept { return in_[c]; }
  const std::vector<std::uint32_t>& out_rows() const noexcept { return out_; }
  std::uint32_t all_colours() const noexcept;

  /// Arcs as index pairs, sorted by (tail, head).
  std::vector<std::pair<int, int>> arcs() const;
  int arc_count() const noexcept;

  /// Same colour names in the same order and the same arcs.
  friend bool operator==(const Pattern& a, const Pattern& b) {
    return a.colours_ == b.colours_ && a.out_ == b.out_;
  }

private:
  void rebuild_in_rows();

  std::vector<std::string> colours_;
  std::vector<std::uint32_t> out_;
  std::vector<std::uint32_t> in_;
};

Pattern new_pattern(std::vector<std::string> colours,
                    const std::vector<std::pair<std::string, std::string>>& arcs);

/// Complete reflexive pattern on the given colours.
Pattern complete_reflexive(std::vector<std::string> colours);

bool is_reflexive(const Pattern& p);

/// Loopless complement on the same colours.
Pattern complement(const Pattern& p);

/// Restriction to a colour subset, keeping the order of p. Throws UnknownColour.
Pattern induced_subpattern(const Pattern& p, const std::vector<std::string>& subset);
Pattern induced_subpattern(const Pattern& p, std::uint32_t colour_mask);

/// Arc set of `sub` is contained in that of `super` under matching colour names.
bool is_spanning_subpattern(const Pattern& sub, const Pattern& super);

}  // namespace hkernel
