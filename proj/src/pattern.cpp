#include "hkernel/pattern.hpp"

#include "hkernel/error.hpp"

#include <algorithm>
#include <bit>
#include <unordered_set>

namespace hkernel {

namespace {

void check_names(const std::vector<std::string>& colours) {
  if (colours.size() > static_cast<std::size_t>(Pattern::kMaxColours)) {
    throw Error(ErrorCode::TooLarge, "pattern has more than " +
                                         std::to_string(Pattern::kMaxColours) + " colours");
  }
  std::unordered_set<std::string_view> seen;
  for (const auto& c : colours) {
    if (!seen.insert(c).second) throw Error(ErrorCode::DuplicateColour, "colour '" + c + "'");
  }
}

}  // namespace

Pattern::Pattern(std::vector<std::string> colours,
                 const std::vector<std::pair<std::string, std::string>>& arcs)
    : colours_(std::move(colours)) {
  check_names(colours_);
  out_.assign(colours_.size(), 0);
  for (const auto& [a, b] : arcs) {
    const int ia = index_of(a);
    const int ib = index_of(b);
    out_[ia] |= 1U << ib;
  }
  rebuild_in_rows();
}

Pattern Pattern::from_rows(std::vector<std::string> colours, std::vector<std::uint32_t> out_rows) {
  check_names(colours);
  if (out_rows.size() != colours.size()) {
    throw Error(ErrorCode::Internal, "row count does not match colour count");
  }
  const std::uint32_t mask = colours.size() >= 32 ? ~0U : ((1U << colours.size()) - 1);
  for (auto r : out_rows) {
    if (r & ~mask) throw Error(ErrorCode::UnknownColour, "arc to undeclared colour index");
  }
  Pattern p;
  p.colours_ = std::move(colours);
  p.out_ = std::move(out_rows);
  p.rebuild_in_rows();
  return p;
}

void Pattern::rebuild_in_rows() {
  in_.assign(colours_.size(), 0);
  for (int a = 0; a < size(); ++a) {
    for (int b = 0; b < size(); ++b) {
      if (has_arc(a, b)) in_[b] |= 1U << a;
    }
  }
}

std::optional<int> Pattern::find(std::string_view name) const {
  for (int i = 0; i < size(); ++i) {
    if (colours_[i] == name) return i;
  }
  return std::nullopt;
}

int Pattern::index_of(std::string_view name) const {
  if (auto i = find(name)) return *i;
  throw Error(ErrorCode::UnknownColour, "colour '" + std::string(name) + "'");
}

std::uint32_t Pattern::all_colours() const noexcept {
  return size() >= 32 ? ~0U : ((1U << size()) - 1);
}

std::vector<std::pair<int, int>> Pattern::arcs() const {
  std::vector<std::pair<int, int>> out;
  for (int a = 0; a < size(); ++a) {
    for (int b = 0; b < size(); ++b) {
      if (has_arc(a, b)) out.emplace_back(a, b);
    }
  }
  return out;
}

int Pattern::arc_count() const noexcept {
  int n = 0;
  for (auto r : out_) n += std::popcount(r);
  return n;
}

Pattern new_pattern(std::vector<std::string> colours,
                    const std::vector<std::pair<std::string, std::string>>& arcs) {
  return Pattern(std::move(colours), arcs);
}

Pattern complete_reflexive(std::vector<std::string> colours) {
  const auto n = colours.size();
  const std::uint32_t all = n >= 32 ? ~0U : ((1U << n) - 1);
  return Pattern::from_rows(std::move(colours), std::vector<std::uint32_t>(n, all));
}

bool is_reflexive(const Pattern& p) {
  for (int c = 0; c < p.size(); ++c) {
    if (!p.has_arc(c, c)) return false;
  }
  return true;
}

Pattern complement(const Pattern& p) {
  std::vector<std::uint32_t> rows(p.size());
  for (int a = 0; a < p.size(); ++a) {
    rows[a] = ~p.out_row(a) & p.all_colours() & ~(1U << a);
  }
  return Pattern::from_rows(p.colours(), std::move(rows));
}

Pattern induced_subpattern(const Pattern& p, std::uint32_t colour_mask) {
  std::vector<int> keep;
  for (int c = 0; c < p.size(); ++c) {
    if ((colour_mask >> c) & 1U) keep.push_back(c);
  }
  std::vector<std::string> names;
  std::vector<std::uint32_t> rows;
  for (int i : keep) names.push_back(p.name(i));
  for (int i : keep) {
    std::uint32_t r = 0;
    for (std::size_t j = 0; j < keep.size(); ++j) {
      if (p.has_arc(i, keep[j])) r |= 1U << j;
    }
    rows.push_back(r);
  }
  return Pattern::from_rows(std::move(names), std::move(rows));
}

Pattern induced_subpattern(const Pattern& p, const std::vector<std::string>& subset) {
  std::uint32_t mask = 0;
  for (const auto& c : subset) mask |= 1U << p.index_of(c);
  return induced_subpattern(p, mask);
}

bool is_spanning_subpattern(const Pattern& sub, const Pattern& super) {
  if (sub.size() != super.size()) return false;
  for (int a = 0; a < sub.size(); ++a) {
    auto sa = super.find(sub.name(a));
    if (!sa) return false;
    for (int b = 0; b < sub.size(); ++b) {
      if (sub.has_arc(a, b) && !super.has_arc(*sa, super.index_of(sub.name(b)))) return false;
    }
  }
  return true;
}

}  // namespace hkernel
