#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "irap/error.hpp"
#include "irap/rdf.hpp"

namespace irap {

enum class ParseMode {
  kStrict,   // first syntax error throws ParseError
  kLenient,  // malformed lines are skipped and counted
};

struct ParseOptions {
  ParseMode mode = ParseMode::kStrict;
  /// Scope for blank-node skolemisation. Empty: derived from a hash of the input.
  std::string doc_id;
};

struct ParseResult {
  Graph graph;
  std::size_t lines = 0;
  std::size_t skipped = 0;
  /// At most the first 16 errors, for diagnostics.
  std::vector<ParseError> errors;
};

/// Prefix of the IRIs that replace document-scoped blank nodes.
inline constexpr std::string_view kSkolemPrefix = "urn:skolem:";

ParseResult parse_ntriples(std::string_view input, const ParseOptions& options = {});
ParseResult parse_ntriples(std::istream& in, const ParseOptions& options = {});

/// Parses one N-Triples line (without newline). Blank nodes are skolemised under `doc_id`.
Triple parse_ntriples_line(std::string_view line, std::string_view doc_id, std::size_t line_no = 1);

/// Canonical form: one line per triple, lines sorted bytewise, each ending in "\n".
std::string serialize_ntriples(const Graph& g);
void write_ntriples(std::ostream& out, const Graph& g);

}  // namespace irap
