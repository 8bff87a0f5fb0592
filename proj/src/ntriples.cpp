#include "irap/ntriples.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <istream>
#include <iterator>
#include <optional>
#include <ostream>
#include <sstream>

#include "text_util.hpp"

namespace irap {

namespace {

constexpr std::size_t kMaxRecordedErrors = 16;

std::string content_hash(std::string_view input) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : input) {
    h ^= c;
    h *= 1099511628211ull;
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = kHex[h & 0xF];
    h >>= 4;
  }
  return out;
}

class LineParser {
 public:
  LineParser(std::string_view line, std::size_t line_no, std::string_view doc_id)
      : line_(line), line_no_(line_no), doc_id_(doc_id) {}

  // nullopt for blank and comment-only lines.
  std::optional<Triple> parse() {
    skip_ws();
    if (at_end() || peek() == '#') return std::nullopt;
    Term s = subject();
    require_ws();
    Term p = iri_term();
    require_ws();
    Term o = object();
    skip_ws();
    expect('.');
    skip_ws();
    if (!at_end() && peek() != '#') fail("unexpected content after '.'");
    return Triple(std::move(s), std::move(p), std::move(o));
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(line_no_, pos_ + 1, what); }

  bool at_end() const { return pos_ >= line_.size(); }
  char peek() const { return line_[pos_]; }

  void skip_ws() {
    while (!at_end() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) ++pos_;
  }

  void require_ws() {
    std::size_t before = pos_;
    skip_ws();
    if (pos_ == before && !at_end() && peek() != '"' && peek() != '<' && peek() != '_') fail("expected whitespace");
  }

  void expect(char c) {
    if (at_end() || peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  Term subject() {
    if (at_end()) fail("missing subject");
    if (peek() == '<') return iri_term();
    if (peek() == '_') return blank_term();
    fail("subject must be an IRI or blank node");
  }

  Term object() {
    if (at_end()) fail("missing object");
    if (peek() == '<') return iri_term();
    if (peek() == '_') return blank_term();
    if (peek() == '"') return literal_term();
    fail("object must be an IRI, blank node or literal");
  }

  void read_escape(std::string& out, bool allow_echar) {
    std::size_t start = pos_;
    ++pos_;  // backslash
    if (at_end()) fail("dangling escape");
    char e = peek();
    ++pos_;
    if (e == 'u' || e == 'U') {
      std::size_t digits = e == 'u' ? 4 : 8;
      std::uint32_t cp = 0;
      for (std::size_t k = 0; k < digits; ++k) {
        if (at_end() || detail::hex_value(peek()) < 0) {
          pos_ = start;
          fail("malformed \\u escape");
        }
        cp = cp * 16 + static_cast<std::uint32_t>(detail::hex_value(peek()));
        ++pos_;
      }
      if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
        pos_ = start;
        fail("escape is not a Unicode scalar value");
      }
      detail::append_utf8(out, cp);
      return;
    }
    if (!allow_echar) {
      pos_ = start;
      fail("invalid escape in IRI");
    }
    switch (e) {
      case 't': out.push_back('\t'); break;
      case 'b': out.push_back('\b'); break;
      case 'n': out.push_back('\n'); break;
      case 'r': out.push_back('\r'); break;
      case 'f': out.push_back('\f'); break;
      case '"': out.push_back('"'); break;
      case '\'': out.push_back('\''); break;
      case '\\': out.push_back('\\'); break;
      default:
        pos_ = start;
        fail("invalid escape");
    }
  }

  std::string iri_body() {
    std::size_t start = pos_;
    expect('<');
    std::string iri;
    while (true) {
      if (at_end()) fail("unterminated IRI");
      char c = peek();
      if (c == '>') break;
      if (c == '\\') {
        read_escape(iri, false);
        continue;
      }
      if (static_cast<unsigned char>(c) <= 0x20 || c == '<' || c == '"' || c == '{' || c == '}' || c == '|' ||
          c == '^' || c == '`') {
        fail("character not allowed in IRI");
      }
      iri.push_back(c);
      ++pos_;
    }
    ++pos_;
    if (!is_absolute_iri(iri)) {
      pos_ = start;
      fail("relative IRI");
    }
    return iri;
  }

  Term iri_term() {
    if (at_end() || peek() != '<') fail("expected IRI");
    return Term::iri(iri_body());
  }

  Term blank_term() {
    expect('_');
    expect(':');
    std::size_t start = pos_;
    while (!at_end()) {
      unsigned char c = peek();
      if (std::isalnum(c) || c == '_' || c == '-' || c == '.' || c >= 0x80) {
        ++pos_;
      } else {
        break;
      }
    }
    // A label may not end in '.'; that dot terminates the statement.
    while (pos_ > start && line_[pos_ - 1] == '.') --pos_;
    if (pos_ == start) fail("empty blank node label");
    std::string label(line_.substr(start, pos_ - start));
    return Term::iri(std::string(kSkolemPrefix) + std::string(doc_id_) + ":" + label);
  }

  Term literal_term() {
    expect('"');
    std::string lexical;
    while (true) {
      if (at_end()) fail("unterminated literal");
      char c = peek();
      if (c == '"') break;
      if (c == '\\') {
        read_escape(lexical, true);
        continue;
      }
      lexical.push_back(c);
      ++pos_;
    }
    ++pos_;
    if (!at_end() && peek() == '@') {
      ++pos_;
      std::size_t start = pos_;
      while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '-')) ++pos_;
      std::string_view tag = line_.substr(start, pos_ - start);
      try {
        return Term::lang_literal(lexical, tag);
      } catch (const std::invalid_argument&) {
        pos_ = start;
        fail("malformed language tag");
      }
    }
    if (!at_end() && peek() == '^') {
      ++pos_;
      expect('^');
      if (at_end() || peek() != '<') fail("expected datatype IRI");
      return Term::typed_literal(lexical, iri_body());
    }
    return Term::literal(lexical);
  }

  std::string_view line_;
  std::size_t line_no_;
  std::string_view doc_id_;
  std::size_t pos_ = 0;
};

void record(ParseResult& result, const ParseError& e, ParseMode mode) {
  if (mode == ParseMode::kStrict) throw e;
  ++result.skipped;
  if (result.errors.size() < kMaxRecordedErrors) result.errors.push_back(e);
}

}  // namespace

Triple parse_ntriples_line(std::string_view line, std::string_view doc_id, std::size_t line_no) {
  auto t = LineParser(line, line_no, doc_id).parse();
  if (!t) throw ParseError(line_no, 1, "no triple on line");
  return *t;
}

ParseResult parse_ntriples(std::string_view input, const ParseOptions& options) {
  std::string doc_id = options.doc_id.empty() ? content_hash(input) : options.doc_id;
  ParseResult result;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < input.size()) {
    std::size_t end = input.find('\n', start);
    if (end == std::string_view::npos) end = input.size();
    std::string_view line = input.substr(start, end - start);
    ++line_no;
    try {
      if (auto t = LineParser(line, line_no, doc_id).parse()) result.graph.insert(*t);
    } catch (const ParseError& e) {
      record(result, e, options.mode);
    } catch (const std::invalid_argument& e) {
      record(result, ParseError(line_no, 1, e.what()), options.mode);
    }
    start = end + 1;
  }
  result.lines = line_no;
  return result;
}

ParseResult parse_ntriples(std::istream& in, const ParseOptions& options) {
  std::string content(std::istreambuf_iterator<char>(in), {});
  return parse_ntriples(content, options);
}

std::string serialize_ntriples(const Graph& g) {
  std::vector<std::string> lines;
  lines.reserve(g.size());
  for (const auto& t : g) lines.push_back(t.to_ntriples());
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const auto& line : lines) {
    out += line;
    out += '\n';
  }
  return out;
}

void write_ntriples(std::ostream& out, const Graph& g) { out << serialize_ntriples(g); }

}  // namespace irap
