#pragma once

#include "hkernel/coloured_digraph.hpp"
#include "hkernel/pattern.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace hkernel {

// Pattern file:
//
//   pattern
//   colours: r g b
//   r > g
//
// Digraph file:
//
//   digraph
//   pattern: f1.pat        (optional; path relative to this file)
//   vertices: u v w
//   u > v : g
//
// Blank lines and lines whose first non-blank character is '#' are ignored.
// Identifiers are runs of non-blank characters other than '>', ':' and '#'.

Pattern parse_pattern(std::string_view text);
std::string serialize_pattern(const Pattern& p);

/// Receives the `pattern:` reference of a digraph file (nullopt when absent)
/// and returns the pattern to colour it with.
using PatternResolver =
    std::function<std::shared_ptr<const Pattern>(const std::optional<std::string>& ref)>;

ColouredMultidigraph parse_digraph(std::string_view text, const PatternResolver& resolve);
/// Uses `pattern` regardless of any `pattern:` line.
ColouredMultidigraph parse_digraph(std::string_view text, std::shared_ptr<const Pattern> pattern);
/// The `pattern:` reference of a digraph file, if any.
std::optional<std::string> digraph_pattern_ref(std::string_view text);

std::string serialize_digraph(const ColouredMultidigraph& d,
                              const std::optional<std::string>& pattern_ref = std::nullopt);

/// "-" reads standard input. Throws Io.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view content);

Pattern load_pattern(const std::string& path);
/// Resolves the `pattern:` line relative to the digraph file unless `override_pattern` is set.
ColouredMultidigraph load_digraph(const std::string& path,
                                  std::shared_ptr<const Pattern> override_pattern = nullptr);

}  // namespace hkernel
