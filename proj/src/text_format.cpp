#include "hkernel/text_format.hpp"

#include "hkernel/error.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <unordered_map>

namespace hkernel {

namespace {

struct Token {
  std::string text;
  int column = 0;  // 1-based
};

struct Line {
  int number = 0;
  std::vector<Token> tokens;
};

bool is_blank(char c) { return c == ' ' || c == '\t' || c == '\r'; }
bool is_punct(char c) { return c == '>' || c == ':'; }

// Splits into identifier and punctuation tokens; '#' inside a line is an error.
Line tokenize(std::string_view raw, int number) {
  Line line{number, {}};
  std::size_t i = 0;
  while (i < raw.size()) {
    const char c = raw[i];
    if (is_blank(c)) {
      ++i;
      continue;
    }
    const int col = static_cast<int>(i) + 1;
    if (c == '#') throw SyntaxError(number, col, "'#' is only allowed at the start of a line");
    if (is_punct(c)) {
      line.tokens.push_back({std::string(1, c), col});
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < raw.size() && !is_blank(raw[j]) && !is_punct(raw[j]) && raw[j] != '#') ++j;
    line.tokens.push_back({std::string(raw.substr(i, j - i)), col});
    i = j;
  }
  return line;
}

std::vector<Line> significant_lines(std::string_view text) {
  std::vector<Line> out;
  int number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++number;
    std::string_view raw = text.substr(pos, end - pos);
    std::size_t first = 0;
    while (first < raw.size() && is_blank(raw[first])) ++first;
    if (first < raw.size() && raw[first] != '#') out.push_back(tokenize(raw, number));
    if (end == text.size()) break;
    pos = end + 1;
  }
  return out;
}

int end_column(const Line& l) {
  if (l.tokens.empty()) return 1;
  const auto& t = l.tokens.back();
  return t.column + static_cast<int>(t.text.size());
}

bool is_ident(const Token& t) { return !(t.text.size() == 1 && is_punct(t.text[0])); }

const Line& expect_header(const std::vector<Line>& lines, std::string_view word) {
  if (lines.empty()) throw SyntaxError(1, 1, "expected '" + std::string(word) + "' header");
  const Line& h = lines.front();
  if (h.tokens.size() != 1 || h.tokens[0].text != word) {
    throw SyntaxError(h.number, h.tokens[0].column, "expected '" + std::string(word) + "' header");
  }
  return h;
}

// "key: id id ..." -> identifiers with their tokens.
std::vector<Token> keyed_list(const Line& l, std::string_view key) {
  if (l.tokens.size() < 2 || l.tokens[0].text != key || l.tokens[1].text != ":") {
    throw SyntaxError(l.number, l.tokens.empty() ? 1 : l.tokens[0].column,
                      "expected '" + std::string(key) + ":' line");
  }
  std::vector<Token> ids;
  for (std::size_t i = 2; i < l.tokens.size(); ++i) {
    if (!is_ident(l.tokens[i])) {
      throw SyntaxError(l.number, l.tokens[i].column, "unexpected '" + l.tokens[i].text + "'");
    }
    ids.push_back(l.tokens[i]);
  }
  return ids;
}

bool is_keyed(const Line& l, std::string_view key) {
  return l.tokens.size() >= 2 && l.tokens[0].text == key && l.tokens[1].text == ":";
}

}  // namespace

Pattern parse_pattern(std::string_view text) {
  const auto lines = significant_lines(text);
  expect_header(lines, "pattern");
  if (lines.size() < 2) throw SyntaxError(lines[0].number + 1, 1, "expected 'colours:' line");
  const auto colour_tokens = keyed_list(lines[1], "colours");
  std::unordered_map<std::string, int> index;
  std::vector<std::string> colours;
  for (const auto& t : colour_tokens) {
    if (!index.emplace(t.text, static_cast<int>(colours.size())).second) {
      throw SyntaxError(lines[1].number, t.column, "duplicate colour '" + t.text + "'");
    }
    colours.push_back(t.text);
  }
  if (colours.size() > static_cast<std::size_t>(Pattern::kMaxColours)) {
    throw SyntaxError(lines[1].number, 1, "too many colours");
  }
  std::vector<std::uint32_t> rows(colours.size(), 0);
  for (std::size_t i = 2; i < lines.size(); ++i) {
    const Line& l = lines[i];
    if (l.tokens.size() != 3 || !is_ident(l.tokens[0]) || l.tokens[1].text != ">" ||
        !is_ident(l.tokens[2])) {
      throw SyntaxError(l.number, l.tokens[0].column, "expected 'tail > head'");
    }
    int ends[2];
    for (int k = 0; k < 2; ++k) {
      const Token& t = l.tokens[k * 2];
      auto it = index.find(t.text);
      if (it == index.end()) throw SyntaxError(l.number, t.column, "unknown colour '" + t.text + "'");
      ends[k] = it->second;
    }
    rows[ends[0]] |= 1U << ends[1];
  }
  return Pattern::from_rows(std::move(colours), std::move(rows));
}

std::string serialize_pattern(const Pattern& p) {
  std::string out = "pattern\ncolours:";
  for (const auto& c : p.colours()) out += " " + c;
  out += "\n";
  for (auto [a, b] : p.arcs()) out += p.name(a) + " > " + p.name(b) + "\n";
  return out;
}

std::optional<std::string> digraph_pattern_ref(std::string_view text) {
  const auto lines = significant_lines(text);
  expect_header(lines, "digraph");
  if (lines.size() >= 2 && is_keyed(lines[1], "pattern")) {
    const auto ids = keyed_list(lines[1], "pattern");
    if (ids.size() != 1) throw SyntaxError(lines[1].number, lines[1].tokens[0].column,
                                           "expected exactly one pattern reference");
    return ids[0].text;
  }
  return std::nullopt;
}

ColouredMultidigraph parse_digraph(std::string_view text, const PatternResolver& resolve) {
  const auto lines = significant_lines(text);
  expect_header(lines, "digraph");
  std::size_t next = 1;
  std::optional<std::string> ref;
  if (lines.size() > next && is_keyed(lines[next], "pattern")) {
    ref = digraph_pattern_ref(text);
    ++next;
  }
  auto pattern = resolve(ref);
  if (!pattern) throw Error(ErrorCode::PatternMismatch, "digraph file has no pattern");
  if (lines.size() <= next) throw SyntaxError(lines.back().number + 1, 1, "expected 'vertices:' line");
  const auto vertex_tokens = keyed_list(lines[next], "vertices");
  std::unordered_map<std::string, int> index;
  std::vector<std::string> vertices;
  for (const auto& t : vertex_tokens) {
    if (!index.emplace(t.text, static_cast<int>(vertices.size())).second) {
      throw SyntaxError(lines[next].number, t.column, "duplicate vertex '" + t.text + "'");
    }
    vertices.push_back(t.text);
  }
  if (vertices.size() > static_cast<std::size_t>(ColouredMultidigraph::kMaxVertices)) {
    throw SyntaxError(lines[next].number, 1, "too many vertices");
  }
  std::vector<Arc> arcs;
  for (std::size_t i = next + 1; i < lines.size(); ++i) {
    const Line& l = lines[i];
    if (l.tokens.size() != 5 || !is_ident(l.tokens[0]) || l.tokens[1].text != ">" ||
        !is_ident(l.tokens[2]) || l.tokens[3].text != ":" || !is_ident(l.tokens[4])) {
      if (l.tokens.size() == 3 && l.tokens[1].text == ">") {
        throw SyntaxError(l.number, end_column(l), "missing ': colour'");
      }
      throw SyntaxError(l.number, l.tokens[0].column, "expected 'tail > head : colour'");
    }
    int ends[2];
    for (int k = 0; k < 2; ++k) {
      const Token& t = l.tokens[k * 2];
      auto it = index.find(t.text);
      if (it == index.end()) throw SyntaxError(l.number, t.column, "unknown vertex '" + t.text + "'");
      ends[k] = it->second;
    }
    if (ends[0] == ends[1]) throw SyntaxError(l.number, l.tokens[0].column, "loop arc");
    auto colour = pattern->find(l.tokens[4].text);
    if (!colour) {
      throw SyntaxError(l.number, l.tokens[4].column, "unknown colour '" + l.tokens[4].text + "'");
    }
    arcs.push_back({ends[0], ends[1], *colour});
  }
  return ColouredMultidigraph(std::move(pattern), std::move(vertices), std::move(arcs));
}

ColouredMultidigraph parse_digraph(std::string_view text, std::shared_ptr<const Pattern> pattern) {
  return parse_digraph(text, [&](const std::optional<std::string>&) { return pattern; });
}

std::string serialize_digraph(const ColouredMultidigraph& d,
                              const std::optional<std::string>& pattern_ref) {
  std::string out = "digraph\n";
  if (pattern_ref) out += "pattern: " + *pattern_ref + "\n";
  out += "vertices:";
  for (const auto& v : d.vertices()) out += " " + v;
  out += "\n";
  for (const auto& a : d.arcs()) {
    out += d.name(a.tail) + " > " + d.name(a.head) + " : " + d.pattern().name(a.colour) + "\n";
  }
  return out;
}

std::string read_text_file(const std::string& path) {
  if (path == "-") {
    return std::string(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, std::string_view content) {
  if (path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  out << content;
  if (!out) throw Error(ErrorCode::Io, "write failed for '" + path + "'");
}

Pattern load_pattern(const std::string& path) { return parse_pattern(read_text_file(path)); }

ColouredMultidigraph load_digraph(const std::string& path,
                                  std::shared_ptr<const Pattern> override_pattern) {
  const std::string text = read_text_file(path);
  return parse_digraph(text, [&](const std::optional<std::string>& ref) {
    if (override_pattern) return override_pattern;
    if (!ref) throw Error(ErrorCode::PatternMismatch, "'" + path + "' names no pattern; pass one explicitly");
    std::filesystem::path p(*ref);
    if (p.is_relative() && path != "-") p = std::filesystem::path(path).parent_path() / p;
    return std::make_shared<const Pattern>(load_pattern(p.string()));
  });
}

}  // namespace hkernel
