#include "hkernel/enumerate.hpp"

#include "hkernel/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hkernel {

OrderlyEnumerator::OrderlyEnumerator(int n, std::uint64_t diagonal, std::vector<std::uint64_t> alphabet,
                                     std::vector<int> weights)
    : n_(n), diagonal_(diagonal), alphabet_(std::move(alphabet)), weights_(std::move(weights)) {
  if (n_ < 0 || n_ > 64) throw Error(ErrorCode::TooLarge, "orderly generation supports 0..64 vertices");
  if (alphabet_.empty() || alphabet_.size() != weights_.size()) {
    throw Error(ErrorCode::Internal, "alphabet and weights must be non-empty and parallel");
  }
  if (!std::is_sorted(alphabet_.begin(), alphabet_.end()) ||
      std::adjacent_find(alphabet_.begin(), alphabet_.end()) != alphabet_.end()) {
    throw Error(ErrorCode::Internal, "alphabet must be strictly increasing");
  }
  max_weight_ = *std::max_element(weights_.begin(), weights_.end());
  for (int k = 1; k < n_; ++k) {
    for (int j = 0; j < k; ++j) {
      cells_.emplace_back(j, k);
      block_end_.push_back(-1);
      cells_.emplace_back(k, j);
      block_end_.push_back(j == k - 1 ? k : -1);
    }
  }
}

std::pair<int, int> OrderlyEnumerator::slot_cell(int slot) const { return cells_.at(slot); }

struct OrderlyEnumerator::Run {
  const OrderlyEnumerator& e;
  int m;
  std::span<const std::uint64_t> prefix;
  std::span<const std::uint64_t> start;
  const Visitor* visit;  // null when only collecting prefixes
  int stop_at;
  std::vector<std::vector<std::uint64_t>>* collected;
  std::uint64_t rejected = 0;
  std::vector<std::uint64_t> mat;
  std::vector<std::uint64_t> sub;
  std::vector<std::uint64_t> slots;

  Run(const OrderlyEnumerator& en, int weight, std::span<const std::uint64_t> pre,
      std::span<const std::uint64_t> st, const Visitor* v, int stop,
      std::vector<std::vector<std::uint64_t>>* out)
      : e(en), m(weight), prefix(pre), start(st), visit(v), stop_at(stop), collected(out) {
    mat.assign(static_cast<std::size_t>(e.n_) * e.n_, 0);
    for (int i = 0; i < e.n_; ++i) mat[static_cast<std::size_t>(i) * e.n_ + i] = e.diagonal_;
  }

  bool prefix_canonical(int k) {
    const int s = k + 1;
    sub.resize(static_cast<std::size_t>(s) * s);
    for (int i = 0; i < s; ++i) {
      for (int j = 0; j < s; ++j) sub[static_cast<std::size_t>(i) * s + j] = mat[static_cast<std::size_t>(i) * e.n_ + j];
    }
    return is_canonical_labelling(TokenMatrix{s, sub});
  }

  // Returns false when the visitor asked to stop.
  bool rec(int slot, int used, bool tight) {
    const int total = e.slot_count();
    if (slot == stop_at) {
      if (m >= 0) {
        if (used > m || used + (total - slot) * e.max_weight_ < m) return true;
        if (slot == total && used != m) return true;
      }
      if (collected) {
        collected->push_back(slots);
        return true;
      }
      return (*visit)(mat);
    }
    const int remaining_after = total - slot - 1;
    const auto [r, c] = e.cells_[slot];
    auto& cell = mat[static_cast<std::size_t>(r) * e.n_ + c];
    for (std::size_t i = 0; i < e.alphabet_.size(); ++i) {
      const std::uint64_t tok = e.alphabet_[i];
      if (slot < static_cast<int>(prefix.size()) && tok != prefix[slot]) continue;
      const bool bounded = tight && slot < static_cast<int>(start.size());
      if (bounded && tok < start[slot]) continue;
      const int nu = used + e.weights_[i];
      if (m >= 0 && (nu > m || nu + remaining_after * e.max_weight_ < m)) continue;
      cell = tok;
      if (e.block_end_[slot] >= 0 && !prefix_canonical(e.block_end_[slot])) {
        ++rejected;
        continue;
      }
      slots.push_back(tok);
      const bool ok = rec(slot + 1, nu, bounded && tok == start[slot]);
      slots.pop_back();
      if (!ok) {
        cell = 0;
        return false;
      }
    }
    cell = 0;
    return true;
  }
};

bool OrderlyEnumerator::run(int m, std::span<const std::uint64_t> prefix,
                            std::span<const std::uint64_t> start, const Visitor& visit,
                            std::uint64_t* rejected) const {
  Run r(*this, m, prefix, start, &visit, slot_count(), nullptr);
  const bool ok = r.rec(0, 0, !start.empty());
  if (rejected) *rejected += r.rejected;
  return ok;
}

std::vector<std::vector<std::uint64_t>> OrderlyEnumerator::prefixes(int m, int len) const {
  std::vector<std::vector<std::uint64_t>> out;
  Run r(*this, m, {}, {}, nullptr, std::min(len, slot_count()), &out);
  r.rec(0, 0, false);
  return out;
}

PairAlphabet pair_alphabet(int colours, int max_parallel, int max_arcs_per_pair) {
  if (colours < 0 || colours > 16) throw Error(ErrorCode::TooLarge, "at most 16 colours");
  if (max_parallel < 0 || max_parallel > 15) throw Error(ErrorCode::TooLarge, "at most 15 parallel arcs");
  std::vector<std::pair<std::uint64_t, int>> items;
  std::vector<int> k(colours, 0);
  while (true) {
    const int sum = std::accumulate(k.begin(), k.end(), 0);
    if (sum <= max_arcs_per_pair) {
      std::uint64_t tok = 0;
      for (int c = 0; c < colours; ++c) tok |= static_cast<std::uint64_t>(k[c]) << (4 * (colours - 1 - c));
      items.emplace_back(tok, sum);
    }
    int i = 0;
    while (i < colours && k[i] == max_parallel) k[i++] = 0;
    if (i == colours) break;
    ++k[i];
  }
  std::sort(items.begin(), items.end());
  PairAlphabet a;
  for (auto [t, w] : items) {
    a.tokens.push_back(t);
    a.weights.push_back(w);
  }
  return a;
}

std::vector<Pattern> enumerate_patterns_exact(int k) {
  if (k < 1 || k > 5) throw Error(ErrorCode::BoundTooLarge, "pattern enumeration supports 1..5 colours");
  OrderlyEnumerator e(k, 1, {0, 1}, {0, 1});
  std::vector<std::string> names;
  for (int i = 0; i < k; ++i) names.emplace_back(1, static_cast<char>('a' + i));
  std::vector<Pattern> out;
  e.run(-1, {}, {}, [&](std::span<const std::uint64_t> mat) {
    std::vector<std::uint32_t> rows(k, 0);
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) {
        if (mat[static_cast<std::size_t>(i) * k + j]) rows[i] |= 1U << j;
      }
    }
    out.push_back(Pattern::from_rows(names, std::move(rows)));
    return true;
  });
  return out;
}

std::vector<Pattern> enumerate_patterns(int max_colours) {
  if (max_colours > 5) throw Error(ErrorCode::BoundTooLarge, "pattern enumeration supports at most 5 colours");
  std::vector<Pattern> out;
  for (int k = 1; k <= max_colours; ++k) {
    auto part = enumerate_patterns_exact(k);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

std::vector<std::string> default_vertex_names(int n) {
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back("v" + std::to_string(i));
  return names;
}

ColouredMultidigraph digraph_from_tokens(std::shared_ptr<const Pattern> pattern, int n,
                                         std::span<const std::uint64_t> tokens) {
  const int C = pattern->size();
  std::vector<Arc> arcs;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const std::uint64_t tok = tokens[static_cast<std::size_t>(i) * n + j];
      if (!tok || i == j) continue;
      for (int c = 0; c < C; ++c) {
        const int count = static_cast<int>((tok >> (4 * (C - 1 - c))) & 15U);
        for (int r = 0; r < count; ++r) arcs.push_back({i, j, c});
      }
    }
  }
  return ColouredMultidigraph(std::move(pattern), default_vertex_names(n), std::move(arcs));
}

double raw_digraph_count(int n, const PairAlphabet& alphabet) {
  return std::pow(static_cast<double>(alphabet.tokens.size()), static_cast<double>(n) * (n - 1));
}

std::vector<ColouredMultidigraph> enumerate_coloured_digraphs(std::shared_ptr<const Pattern> pattern,
                                                              int max_vertices, int max_parallel) {
  const int C = pattern->size();
  const auto alphabet = pair_alphabet(C, max_parallel, C * max_parallel);
  double raw = 0;
  for (int n = 1; n <= max_vertices; ++n) raw += raw_digraph_count(n, alphabet);
  if (raw > kRawGuard) throw Error(ErrorCode::BoundTooLarge, "raw digraph space exceeds 10^10");
  std::vector<ColouredMultidigraph> out;
  for (int n = 1; n <= max_vertices; ++n) {
    OrderlyEnumerator e(n, 0, alphabet.tokens, alphabet.weights);
    const int max_m = e.slot_count() * e.max_weight();
    for (int m = 0; m <= max_m; ++m) {
      e.run(m, {}, {}, [&](std::span<const std::uint64_t> mat) {
        out.push_back(digraph_from_tokens(pattern, n, mat));
        return true;
      });
    }
  }
  return out;
}

}  // namespace hkernel
