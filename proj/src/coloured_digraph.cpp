#include "hkernel/coloured_digraph.hpp"

#include "hkernel/error.hpp"

#include <unordered_set>

namespace hkernel {

std::vector<int> VertexSet::indices() const {
  std::vector<int> out;
  for (std::uint64_t b = bits_; b; b &= b - 1) out.push_back(std::countr_zero(b));
  return out;
}

ColouredMultidigraph::ColouredMultidigraph(std::shared_ptr<const Pattern> pattern,
                                           std::vector<std::string> vertices,
                                           std::vector<Arc> arcs)
    : pattern_(std::move(pattern)), vertices_(std::move(vertices)), arcs_(std::move(arcs)) {
  if (!pattern_) throw Error(ErrorCode::Internal, "digraph without pattern");
  std::unordered_set<std::string_view> seen;
  for (const auto& v : vertices_) {
    if (!seen.insert(v).second) throw Error(ErrorCode::DuplicateVertex, "vertex '" + v + "'");
  }
  const int n = vertex_count();
  pair_colours_.assign(static_cast<std::size_t>(n) * n, 0);
  for (const auto& a : arcs_) {
    if (a.tail < 0 || a.tail >= n || a.head < 0 || a.head >= n) {
      throw Error(ErrorCode::UnknownVertex, "arc endpoint out of range");
    }
    if (a.tail == a.head) throw Error(ErrorCode::LoopArc, "loop at '" + vertices_[a.tail] + "'");
    if (a.colour < 0 || a.colour >= pattern_->size()) {
      throw Error(ErrorCode::UnknownColour, "arc colour index out of range");
    }
    pair_colours_[static_cast<std::size_t>(a.tail) * n + a.head] |= 1U << a.colour;
  }
}

std::optional<int> ColouredMultidigraph::find(std::string_view name) const {
  for (int i = 0; i < vertex_count(); ++i) {
    if (vertices_[i] == name) return i;
  }
  return std::nullopt;
}

int ColouredMultidigraph::index_of(std::string_view name) const {
  if (auto i = find(name)) return *i;
  throw Error(ErrorCode::UnknownVertex, "vertex '" + std::string(name) + "'");
}

int ColouredMultidigraph::multiplicity(int tail, int head, int colour) const {
  int m = 0;
  for (const auto& a : arcs_) {
    if (a.tail == tail && a.head == head && a.colour == colour) ++m;
  }
  return m;
}

std::optional<int> ColouredMultidigraph::find_arc(int tail, int head, int colour) const {
  for (int i = 0; i < arc_count(); ++i) {
    const auto& a = arcs_[i];
    if (a.tail == tail && a.head == head && a.colour == colour) return i;
  }
  return std::nullopt;
}

std::vector<VertexSet> ColouredMultidigraph::underlying_out() const {
  if (vertex_count() > kMaxVertices) {
    throw Error(ErrorCode::TooLarge, "set queries support at most 64 vertices");
  }
  std::vector<VertexSet> out(vertex_count());
  for (const auto& a : arcs_) out[a.tail].insert(a.head);
  return out;
}

ColouredMultidigraph ColouredMultidigraph::dedupe() const {
  std::vector<Arc> kept;
  for (const auto& a : arcs_) {
    bool dup = false;
    for (const auto& k : kept) {
      if (k == a) {
        dup = true;
        break;
      }
    }
    if (!dup) kept.push_back(a);
  }
  return ColouredMultidigraph(pattern_, vertices_, std::move(kept));
}

VertexSet ColouredMultidigraph::names_to_set(const std::vector<std::string>& names) const {
  if (vertex_count() > kMaxVertices) {
    throw Error(ErrorCode::TooLarge, "set queries support at most 64 vertices");
  }
  VertexSet s;
  for (const auto& n : names) s.insert(index_of(n));
  return s;
}

std::vector<std::string> ColouredMultidigraph::set_to_names(VertexSet s) const {
  std::vector<std::string> out;
  for (int v : s.indices()) out.push_back(vertices_.at(v));
  return out;
}

ColouredMultidigraph new_coloured_digraph(
    std::vector<std::string> vertices,
    const std::vector<std::tuple<std::string, std::string, std::string>>& arcs,
    std::shared_ptr<const Pattern> pattern) {
  std::vector<Arc> idx;
  idx.reserve(arcs.size());
  auto lookup = [&](const std::string& name) {
    for (std::size_t i = 0; i < vertices.size(); ++i) {
      if (vertices[i] == name) return static_cast<int>(i);
    }
    throw Error(ErrorCode::UnknownVertex, "vertex '" + name + "'");
  };
  for (const auto& [t, h, c] : arcs) {
    idx.push_back(Arc{lookup(t), lookup(h), pattern->index_of(c)});
  }
  return ColouredMultidigraph(std::move(pattern), std::move(vertices), std::move(idx));
}

bool same_digraph(const ColouredMultidigraph& a, const ColouredMultidigraph& b) {
  return a.pattern() == b.pattern() && a.vertices() == b.vertices() && a.arcs() == b.arcs();
}

}  // namespace hkernel
