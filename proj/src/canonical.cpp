#include "hkernel/canonical.hpp"

#include "hkernel/error.hpp"

#include <algorithm>

namespace hkernel {

namespace {

// Branch and bound over vertex orders for the lexicographically least block
// encoding. Unplaced structural twins are interchangeable, so only the lowest
// one is tried at each position.
class LeastEncodingSearch {
public:
  LeastEncodingSearch(TokenMatrix m, bool stop_on_smaller_than_identity)
      : m_(m),
        n_(m.n),
        early_(stop_on_smaller_than_identity),
        order_(m.n),
        cur_(static_cast<std::size_t>(m.n) * m.n),
        best_(static_cast<std::size_t>(m.n) * m.n),
        twin_(static_cast<std::size_t>(m.n) * m.n, 0) {
    for (int u = 0; u < n_; ++u) {
      for (int v = u + 1; v < n_; ++v) {
        if (twins(u, v)) twin_[static_cast<std::size_t>(v) * n_ + u] = 1;
      }
    }
    if (early_) {
      std::vector<int> id(n_);
      for (int i = 0; i < n_; ++i) id[i] = i;
      best_ = block_encoding(m_, id);
      best_order_ = id;
      have_best_ = true;
    }
  }

  void run() {
    if (n_ == 0) {
      have_best_ = true;
      return;
    }
    place(0, 0, false);
  }

  bool found_smaller() const { return found_smaller_; }
  const std::vector<int>& best_order() const { return best_order_; }

private:
  bool twins(int u, int v) const {
    if (m_.at(u, u) != m_.at(v, v) || m_.at(u, v) != m_.at(v, u)) return false;
    for (int x = 0; x < n_; ++x) {
      if (x == u || x == v) continue;
      if (m_.at(u, x) != m_.at(v, x) || m_.at(x, u) != m_.at(x, v)) return false;
    }
    return true;
  }

  void place(int k, std::uint64_t used, bool less) {
    if (k == n_) {
      if (!have_best_ || less) {
        best_ = cur_;
        best_order_ = order_;
        have_best_ = true;
        ++generation_;
      }
      return;
    }
    const std::size_t start = static_cast<std::size_t>(k) * k;
    const std::size_t len = 2 * static_cast<std::size_t>(k) + 1;
    for (int v = 0; v < n_; ++v) {
      if ((used >> v) & 1U) continue;
      bool pruned_twin = false;
      for (int u = 0; u < v; ++u) {
        if (!((used >> u) & 1U) && twin_[static_cast<std::size_t>(v) * n_ + u]) {
          pruned_twin = true;
          break;
        }
      }
      if (pruned_twin) continue;

      order_[k] = v;
      cur_[start] = m_.at(v, v);
      for (int j = 0; j < k; ++j) {
        cur_[start + 1 + 2 * j] = m_.at(order_[j], v);
        cur_[start + 2 + 2 * j] = m_.at(v, order_[j]);
      }
      bool child_less = less;
      if (have_best_ && !less) {
        int cmp = 0;
        for (std::size_t i = start; i < start + len; ++i) {
          if (cur_[i] != best_[i]) {
            cmp = cur_[i] < best_[i] ? -1 : 1;
            break;
          }
        }
        if (cmp > 0) continue;
        if (cmp < 0) {
          if (early_) {
            found_smaller_ = true;
            return;
          }
          child_less = true;
        }
      }
      const auto gen = generation_;
      place(k + 1, used | (std::uint64_t{1} << v), child_less);
      if (found_smaller_) return;
      // A new best found below shares this node's prefix.
      if (generation_ != gen) less = false;
    }
  }

  TokenMatrix m_;
  int n_;
  bool early_;
  std::vector<int> order_;
  std::vector<std::uint64_t> cur_;
  std::vector<std::uint64_t> best_;
  std::vector<int> best_order_;
  std::vector<std::uint8_t> twin_;
  bool have_best_ = false;
  bool found_smaller_ = false;
  std::uint64_t generation_ = 0;
};

int token_width(char kind, int colours) {
  if (kind == 'P') return 1;
  return std::max(1, (4 * colours + 7) / 8);
}

}  // namespace

std::string CanonicalCode::hex() const {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 15]);
  }
  return out;
}

CanonicalCode CanonicalCode::from_hex(std::string_view hex) {
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw Error(ErrorCode::SyntaxError, "bad hex digit in canonical code");
  };
  if (hex.size() % 2) throw Error(ErrorCode::SyntaxError, "odd-length canonical code");
  CanonicalCode c;
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    c.bytes.push_back(static_cast<std::uint8_t>(nibble(hex[i]) * 16 + nibble(hex[i + 1])));
  }
  return c;
}

std::vector<int> canonical_order(TokenMatrix m) {
  if (m.n > 64) throw Error(ErrorCode::TooLarge, "canonical codes support at most 64 vertices");
  LeastEncodingSearch s(m, false);
  s.run();
  return s.best_order();
}

bool is_canonical_labelling(TokenMatrix m) {
  if (m.n > 64) throw Error(ErrorCode::TooLarge, "canonical codes support at most 64 vertices");
  LeastEncodingSearch s(m, true);
  s.run();
  return !s.found_smaller();
}

std::vector<std::uint64_t> block_encoding(TokenMatrix m, std::span<const int> order) {
  std::vector<std::uint64_t> out;
  out.reserve(static_cast<std::size_t>(m.n) * m.n);
  for (int k = 0; k < m.n; ++k) {
    out.push_back(m.at(order[k], order[k]));
    for (int j = 0; j < k; ++j) {
      out.push_back(m.at(order[j], order[k]));
      out.push_back(m.at(order[k], order[j]));
    }
  }
  return out;
}

std::vector<std::uint64_t> pattern_tokens(const Pattern& p) {
  const int n = p.size();
  std::vector<std::uint64_t> t(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) t[static_cast<std::size_t>(i) * n + j] = p.has_arc(i, j) ? 1 : 0;
  }
  return t;
}

std::vector<std::uint64_t> digraph_tokens(const ColouredMultidigraph& d) {
  const int n = d.vertex_count();
  const int colours = d.pattern().size();
  if (colours > 16) throw Error(ErrorCode::TooLarge, "digraph codes support at most 16 colours");
  std::vector<std::uint64_t> t(static_cast<std::size_t>(n) * n, 0);
  for (const auto& a : d.arcs()) {
    const int shift = 4 * (colours - 1 - a.colour);
    auto& tok = t[static_cast<std::size_t>(a.tail) * n + a.head];
    if (((tok >> shift) & 15U) == 15U) {
      throw Error(ErrorCode::TooLarge, "digraph codes support at most 15 parallel arcs per colour");
    }
    tok += std::uint64_t{1} << shift;
  }
  return t;
}

CanonicalCode encode_code(char kind, int n, int colours, std::span<const std::uint64_t> blocks) {
  CanonicalCode c;
  const int w = token_width(kind, colours);
  c.bytes.reserve(3 + blocks.size() * w);
  c.bytes.push_back(static_cast<std::uint8_t>(kind));
  c.bytes.push_back(static_cast<std::uint8_t>(n));
  c.bytes.push_back(static_cast<std::uint8_t>(colours));
  for (auto tok : blocks) {
    for (int b = w - 1; b >= 0; --b) c.bytes.push_back(static_cast<std::uint8_t>(tok >> (8 * b)));
  }
  return c;
}

CanonicalCode canonical_code(const Pattern& p) {
  const auto t = pattern_tokens(p);
  const TokenMatrix m{p.size(), t};
  const auto order = canonical_order(m);
  return encode_code('P', p.size(), p.size(), block_encoding(m, order));
}

CanonicalCode canonical_code(const ColouredMultidigraph& d) {
  const auto t = digraph_tokens(d);
  const TokenMatrix m{d.vertex_count(), t};
  const auto order = canonical_order(m);
  return encode_code('D', d.vertex_count(), d.pattern().size(), block_encoding(m, order));
}

Pattern canonical_relabel(const Pattern& p) {
  const auto t = pattern_tokens(p);
  const auto order = canonical_order(TokenMatrix{p.size(), t});
  std::vector<std::string> names;
  std::vector<std::uint32_t> rows(p.size(), 0);
  for (int i = 0; i < p.size(); ++i) names.push_back(p.name(order[i]));
  for (int i = 0; i < p.size(); ++i) {
    for (int j = 0; j < p.size(); ++j) {
      if (p.has_arc(order[i], order[j])) rows[i] |= 1U << j;
    }
  }
  return Pattern::from_rows(std::move(names), std::move(rows));
}

bool isomorphic(const Pattern& a, const Pattern& b) {
  return canonical_code(a) == canonical_code(b);
}

}  // namespace hkernel
