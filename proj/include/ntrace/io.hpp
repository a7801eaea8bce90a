#pragma once

#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ntrace/graph.hpp"

namespace ntrace {

/// Malformed input; `line()` is 1-based, 0 when not tied to a line.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

namespace detail {

inline bool valid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    auto c = static_cast<unsigned char>(s[i]);
    std::size_t extra;
    std::uint32_t cp;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      extra = 1;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      extra = 2;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      extra = 3;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + extra >= s.size()) return false;
    for (std::size_t k = 1; k <= extra; ++k) {
      auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    // overlong, surrogate and out-of-range sequences
    if ((extra == 1 && cp < 0x80) || (extra == 2 && cp < 0x800) || (extra == 3 && cp < 0x10000)) return false;
    if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return false;
    i += extra + 1;
  }
  return true;
}

inline bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

// Splits on ASCII whitespace; collects at most `limit` tokens.
inline std::size_t tokenize(std::string_view line, std::string_view* out, std::size_t limit) {
  std::size_t count = 0;
  std::size_t i = 0;
  while (i < line.size() && count < limit) {
    while (i < line.size() && is_space(line[i])) ++i;
    if (i == line.size()) break;
    std::size_t start = i;
    while (i < line.size() && !is_space(line[i])) ++i;
    out[count++] = line.substr(start, i - start);
  }
  return count;
}

}  // namespace detail

/// Reads a whitespace-separated edge list. Blank lines and lines starting
/// with '#' or '%' are skipped; tokens after the second are ignored.
inline Graph parse_edge_list(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!detail::valid_utf8(line)) throw ParseError(line_no, "input is not valid UTF-8");
    std::string_view tokens[2];
    std::size_t count = detail::tokenize(line, tokens, 2);
    if (count == 0) continue;
    if (tokens[0].front() == '#' || tokens[0].front() == '%') continue;
    if (count == 1) throw ParseError(line_no, "expected two vertex tokens, found one");
    pairs.emplace_back(std::string(tokens[0]), std::string(tokens[1]));
  }
  return Graph::from_edges(pairs);
}

inline Graph parse_edge_list(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_edge_list(in);
}

/// One vertex label per line, earliest first.
inline std::string write_ordering(const OrderedGraph& og) {
  std::string out;
  for (Vertex v : og.order()) {
    out += og.graph().label(v);
    out += '\n';
  }
  return out;
}

/// Inverse of write_ordering. Every vertex label of `g` must appear exactly
/// once; blank lines are ignored.
inline OrderedGraph read_ordering(const Graph& g, std::istream& in) {
  std::unordered_map<std::string_view, Vertex> ids;
  ids.reserve(g.n());
  for (Vertex v = 0; v < g.n(); ++v) ids.emplace(g.label(v), v);

  std::vector<Vertex> order;
  order.reserve(g.n());
  std::vector<bool> seen(g.n(), false);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!detail::valid_utf8(line)) throw ParseError(line_no, "input is not valid UTF-8");
    std::string_view tokens[2];
    std::size_t count = detail::tokenize(line, tokens, 2);
    if (count == 0) continue;
    if (count > 1) throw ParseError(line_no, "expected one vertex token per line");
    auto it = ids.find(tokens[0]);
    if (it == ids.end()) throw ParseError(line_no, "unknown vertex '" + std::string(tokens[0]) + "'");
    if (seen[it->second]) throw ParseError(line_no, "duplicate vertex '" + std::string(tokens[0]) + "'");
    seen[it->second] = true;
    order.push_back(it->second);
  }
  if (order.size() != g.n())
    throw ParseError(0, "ordering covers " + std::to_string(order.size()) + " of " + std::to_string(g.n()) +
                            " vertices");
  return OrderedGraph::orient(g, std::move(order));
}

inline OrderedGraph read_ordering(const Graph& g, std::string_view text) {
  std::istringstream in{std::string(text)};
  return read_ordering(g, in);
}

}  // namespace ntrace
