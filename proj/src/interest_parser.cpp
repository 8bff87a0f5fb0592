// Recursive-descent parser for interest expressions: a SPARQL subset with
// PREFIX declarations, one WHERE group, FILTERs and at most one OPTIONAL.

#include <algorithm>
#include <cctype>
#include <map>
#include <stdexcept>

#include "irap/error.hpp"
#include "irap/pattern.hpp"
#include "text_util.hpp"

namespace irap {

namespace {

enum class Tok {
  kEnd,
  kIri,      // text = IRI
  kPname,    // text = prefix:local
  kVar,      // text = name
  kString,   // text = decoded lexical form
  kLangTag,  // text = tag
  kInteger,
  kDecimal,
  kDouble,
  kBlank,
  kWord,  // keywords and function names, text upper-cased
  kPunct,
};

struct Token {
  Tok kind = Tok::kEnd;
  std::string text;
  std::size_t offset = 0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      Token t;
      t.offset = pos_;
      if (pos_ >= src_.size()) {
        out.push_back(t);
        return out;
      }
      char c = src_[pos_];
      if (c == '<' && try_iri(t)) {
      } else if (c == '?' || c == '$') {
        lex_var(t);
      } else if (c == '"' || c == '\'') {
        lex_string(t, c);
      } else if (c == '@' && !out.empty() && out.back().kind == Tok::kString) {
        ++pos_;
        t.kind = Tok::kLangTag;
        t.text = take_while([](char ch) { return std::isalnum(static_cast<unsigned char>(ch)) || ch == '-'; });
        if (t.text.empty()) throw InterestSyntaxError(t.offset, "empty language tag");
      } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                 ((c == '+' || c == '-' || c == '.') && pos_ + 1 < src_.size() &&
                  std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])) && number_allowed(out))) {
        lex_number(t);
      } else if (c == '_' && pos_ + 1 < src_.size() && src_[pos_ + 1] == ':') {
        pos_ += 2;
        t.kind = Tok::kBlank;
        t.text = take_while(is_name_char);
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == ':') {
        lex_word_or_pname(t);
      } else {
        lex_punct(t);
      }
      out.push_back(std::move(t));
    }
  }

 private:
  static bool is_name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
           static_cast<unsigned char>(c) >= 0x80;
  }

  // A sign starts a number only where an operand is expected.
  static bool number_allowed(const std::vector<Token>& out) {
    if (out.empty()) return true;
    const Token& prev = out.back();
    if (prev.kind != Tok::kPunct) return prev.kind == Tok::kWord;
    return prev.text != ")";
  }

  template <typename Pred>
  std::string take_while(Pred pred) {
    std::size_t start = pos_;
    while (pos_ < src_.size() && pred(src_[pos_])) ++pos_;
    return std::string(src_.substr(start, pos_ - start));
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  bool try_iri(Token& t) {
    std::size_t end = pos_ + 1;
    while (end < src_.size()) {
      unsigned char c = src_[end];
      if (c == '>') break;
      if (c <= 0x20 || c == '<' || c == '"' || c == '{' || c == '}' || c == '|' || c == '^' || c == '`') {
        return false;
      }
      ++end;
    }
    if (end >= src_.size()) return false;
    t.kind = Tok::kIri;
    t.text = detail::unescape(src_.substr(pos_ + 1, end - pos_ - 1));
    pos_ = end + 1;
    return true;
  }

  void lex_var(Token& t) {
    ++pos_;
    t.kind = Tok::kVar;
    t.text = take_while(is_name_char);
    if (t.text.empty()) {
      // A lone '?' is a property-path operator.
      t.kind = Tok::kPunct;
      t.text = "?";
    }
  }

  void lex_string(Token& t, char quote) {
    ++pos_;
    t.kind = Tok::kString;
    std::string raw;
    while (true) {
      if (pos_ >= src_.size() || src_[pos_] == '\n') throw InterestSyntaxError(t.offset, "unterminated string");
      char c = src_[pos_];
      if (c == quote) break;
      if (c == '\\' && pos_ + 1 < src_.size()) {
        raw.push_back(c);
        raw.push_back(src_[pos_ + 1]);
        pos_ += 2;
        continue;
      }
      raw.push_back(c);
      ++pos_;
    }
    ++pos_;
    t.text = detail::unescape(raw);
  }

  void lex_number(Token& t) {
    std::size_t start = pos_;
    if (src_[pos_] == '+' || src_[pos_] == '-') ++pos_;
    take_while([](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
    t.kind = Tok::kInteger;
    if (pos_ + 1 < src_.size() && src_[pos_] == '.' && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))) {
      ++pos_;
      take_while([](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
      t.kind = Tok::kDecimal;
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      std::string exp = take_while([](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
      if (exp.empty()) throw InterestSyntaxError(start, "malformed exponent");
      t.kind = Tok::kDouble;
    }
    t.text = std::string(src_.substr(start, pos_ - start));
  }

  void lex_word_or_pname(Token& t) {
    std::string word = take_while(is_name_char);
    if (pos_ < src_.size() && src_[pos_] == ':') {
      ++pos_;
      // Local part: name chars and inner dots (a trailing dot ends the triple).
      std::size_t start = pos_;
      while (pos_ < src_.size() && (is_name_char(src_[pos_]) || src_[pos_] == '.' || src_[pos_] == '%')) ++pos_;
      while (pos_ > start && src_[pos_ - 1] == '.') --pos_;
      t.kind = Tok::kPname;
      t.text = word + ":" + std::string(src_.substr(start, pos_ - start));
      return;
    }
    t.kind = Tok::kWord;
    t.text = word;
    std::transform(t.text.begin(), t.text.end(), t.text.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    if (t.text == "A" && word == "a") t.text = "a";
  }

  void lex_punct(Token& t) {
    static constexpr std::string_view kTwo[] = {"<=", ">=", "!=", "&&", "||", "^^"};
    for (auto op : kTwo) {
      if (src_.substr(pos_, 2) == op) {
        t.kind = Tok::kPunct;
        t.text = std::string(op);
        pos_ += 2;
        return;
      }
    }
    char c = src_[pos_];
    static constexpr std::string_view kOne = "{}().,;*=<>!/|+^[]";
    if (kOne.find(c) == std::string_view::npos) {
      throw InterestSyntaxError(pos_, std::string("unexpected character '") + c + "'");
    }
    t.kind = Tok::kPunct;
    t.text = std::string(1, c);
    ++pos_;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

[[noreturn]] void unsupported(const std::string& what) {
  throw ValidationError(ValidationError::Kind::kUnsupportedConstruct, "unsupported construct: " + what);
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {
    prefixes_["rdf"] = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
    prefixes_["rdfs"] = "http://www.w3.org/2000/01/rdf-schema#";
    prefixes_["xsd"] = std::string(vocab::kXsd);
  }

  void parse(InterestExpression& out) {
    prologue();
    query_form();
    if (is_word("WHERE")) advance();
    expect_punct("{");
    group(out.bgp.patterns, out.bgp.filters, &out.ogp);
    if (peek().kind != Tok::kEnd) {
      if (peek().kind == Tok::kWord) unsupported("solution modifier " + peek().text);
      fail("unexpected content after the WHERE group");
    }
  }

 private:
  const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
  Token advance() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  [[noreturn]] void fail(const std::string& what) const { throw InterestSyntaxError(peek().offset, what); }

  bool is_word(std::string_view w) const { return peek().kind == Tok::kWord && peek().text == w; }
  bool is_punct(std::string_view p) const { return peek().kind == Tok::kPunct && peek().text == p; }

  void expect_punct(std::string_view p) {
    if (!is_punct(p)) fail("expected '" + std::string(p) + "'");
    advance();
  }

  void prologue() {
    while (true) {
      if (is_word("PREFIX")) {
        advance();
        Token name = advance();
        if (name.kind != Tok::kPname || name.text.back() != ':') {
          throw InterestSyntaxError(name.offset, "expected prefix name ending in ':'");
        }
        Token iri = advance();
        if (iri.kind != Tok::kIri) throw InterestSyntaxError(iri.offset, "expected IRI after PREFIX");
        prefixes_[name.text.substr(0, name.text.size() - 1)] = iri.text;
      } else if (is_word("BASE")) {
        unsupported("BASE");
      } else {
        return;
      }
    }
  }

  void query_form() {
    if (is_word("SELECT")) {
      advance();
      if (is_word("DISTINCT") || is_word("REDUCED")) advance();
      if (is_punct("*")) {
        advance();
      } else {
        if (peek().kind != Tok::kVar) fail("expected '*' or variables after SELECT");
        while (peek().kind == Tok::kVar) advance();
      }
      if (!is_word("WHERE")) fail("expected WHERE");
    } else if (is_word("CONSTRUCT")) {
      advance();
      if (is_punct("{")) unsupported("CONSTRUCT template (use CONSTRUCT WHERE)");
      if (!is_word("WHERE")) fail("expected WHERE");
    } else if (is_word("ASK") || is_word("DESCRIBE")) {
      unsupported(peek().text + " query form");
    }
  }

  // Parses group contents after '{' up to and including '}'. `optional` is
  // null inside an OPTIONAL block.
  void group(std::vector<TriplePattern>& patterns, std::vector<FilterExpr>& filters, Ogp* optional) {
    bool seen_optional = false;
    while (true) {
      if (is_punct("}")) {
        advance();
        return;
      }
      if (peek().kind == Tok::kEnd) fail("unterminated group, expected '}'");
      if (is_punct(".")) {
        advance();
        continue;
      }
      if (is_word("FILTER")) {
        advance();
        filters.push_back(constraint());
        continue;
      }
      if (is_word("OPTIONAL")) {
        if (!optional) unsupported("nested OPTIONAL");
        if (seen_optional) unsupported("more than one OPTIONAL block");
        seen_optional = true;
        advance();
        expect_punct("{");
        group(optional->patterns, optional->filters, nullptr);
        continue;
      }
      if (is_punct("{")) unsupported("nested group or UNION");
      if (peek().kind == Tok::kWord) {
        static constexpr std::string_view kUnsupported[] = {"UNION", "GRAPH", "MINUS", "BIND", "VALUES",
                                                            "SERVICE", "EXISTS", "NOT"};
        for (auto w : kUnsupported) {
          if (peek().text == w) unsupported(std::string(w));
        }
      }
      triples_same_subject(patterns);
    }
  }

  void triples_same_subject(std::vector<TriplePattern>& patterns) {
    PatternTerm subject = node("subject");
    while (true) {
      PatternTerm verb = predicate();
      while (true) {
        PatternTerm object = node("object");
        try {
          patterns.emplace_back(subject, verb, std::move(object));
        } catch (const std::invalid_argument& e) {
          fail(e.what());
        }
        if (!is_punct(",")) break;
        advance();
      }
      if (!is_punct(";")) break;
      while (is_punct(";")) advance();
      if (is_punct(".") || is_punct("}")) break;
    }
    if (is_punct(".")) {
      advance();
    } else if (!is_punct("}") && !is_word("FILTER") && !is_word("OPTIONAL")) {
      fail("expected '.' after triple pattern");
    }
  }

  PatternTerm predicate() {
    if (is_punct("^") || is_punct("!") || is_punct("(")) unsupported("property path");
    PatternTerm verb;
    if (peek().kind == Tok::kWord && peek().text == "a") {
      advance();
      verb = Term::iri(vocab::kRdfType);
    } else if (peek().kind == Tok::kVar) {
      verb = Variable{advance().text};
    } else if (peek().kind == Tok::kIri || peek().kind == Tok::kPname) {
      verb = iri(advance());
    } else {
      fail("expected predicate");
    }
    if (is_punct("/") || is_punct("|") || is_punct("*") || is_punct("+") || is_punct("?")) {
      unsupported("property path");
    }
    return verb;
  }

  Term iri(const Token& t) {
    if (t.kind == Tok::kIri) {
      if (!is_absolute_iri(t.text)) throw InterestSyntaxError(t.offset, "relative IRI <" + t.text + ">");
      return Term::iri(t.text);
    }
    auto colon = t.text.find(':');
    std::string prefix = t.text.substr(0, colon);
    auto it = prefixes_.find(prefix);
    if (it == prefixes_.end()) throw InterestSyntaxError(t.offset, "undeclared prefix '" + prefix + ":'");
    std::string full = it->second + t.text.substr(colon + 1);
    if (!is_absolute_iri(full)) throw InterestSyntaxError(t.offset, "prefixed name expands to a relative IRI");
    return Term::iri(full);
  }

  PatternTerm node(const char* role) {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::kVar: return Variable{advance().text};
      case Tok::kIri:
      case Tok::kPname: return iri(advance());
      case Tok::kBlank: unsupported("blank node in pattern (use a variable)");
      case Tok::kPunct:
        if (t.text == "[" || t.text == "(") unsupported("blank node or collection syntax");
        break;
      default: break;
    }
    if (auto lit = literal()) return *lit;
    fail(std::string("expected ") + role);
  }

  std::optional<Term> literal() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::kString: {
        std::string lexical = advance().text;
        if (peek().kind == Tok::kLangTag) {
          Token tag = advance();
          try {
            return Term::lang_literal(lexical, tag.text);
          } catch (const std::invalid_argument&) {
            throw InterestSyntaxError(tag.offset, "malformed language tag");
          }
        }
        if (is_punct("^^")) {
          advance();
          if (peek().kind != Tok::kIri && peek().kind != Tok::kPname) fail("expected datatype IRI");
          return Term::typed_literal(lexical, iri(advance()).value());
        }
        return Term::literal(lexical);
      }
      case Tok::kInteger: return Term::typed_literal(advance().text, vocab::kXsdInteger);
      case Tok::kDecimal: return Term::typed_literal(advance().text, vocab::kXsdDecimal);
      case Tok::kDouble: return Term::typed_literal(advance().text, vocab::kXsdDouble);
      case Tok::kWord:
        if (t.text == "TRUE" || t.text == "FALSE") {
          std::string v = advance().text == "TRUE" ? "true" : "false";
          return Term::typed_literal(v, vocab::kXsdBoolean);
        }
        break;
      default: break;
    }
    return std::nullopt;
  }

  FilterExpr constraint() {
    if (is_punct("(")) {
      advance();
      FilterExpr e = expression();
      expect_punct(")");
      return e;
    }
    if (peek().kind == Tok::kWord) return call();
    fail("expected '(' or function call after FILTER");
  }

  FilterExpr expression() {
    FilterExpr lhs = conjunction();
    while (is_punct("||") || is_word("OR")) {
      advance();
      lhs = FilterExpr::binary(FilterExpr::Op::kOr, std::move(lhs), conjunction());
    }
    return lhs;
  }

  FilterExpr conjunction() {
    FilterExpr lhs = unary();
    while (is_punct("&&") || is_word("AND")) {
      advance();
      lhs = FilterExpr::binary(FilterExpr::Op::kAnd, std::move(lhs), unary());
    }
    return lhs;
  }

  FilterExpr unary() {
    if (is_punct("!") || is_word("NOT")) {
      if (is_word("NOT") && peek(1).kind == Tok::kWord && peek(1).text == "EXISTS") unsupported("NOT EXISTS");
      advance();
      return FilterExpr::unary(FilterExpr::Op::kNot, unary());
    }
    return relational();
  }

  FilterExpr relational() {
    FilterExpr lhs = primary();
    static const std::pair<std::string_view, FilterExpr::Op> kOps[] = {
        {"=", FilterExpr::Op::kEq},  {"!=", FilterExpr::Op::kNe}, {"<", FilterExpr::Op::kLt},
        {"<=", FilterExpr::Op::kLe}, {">", FilterExpr::Op::kGt},  {">=", FilterExpr::Op::kGe}};
    for (const auto& [sym, op] : kOps) {
      if (is_punct(sym)) {
        advance();
        return FilterExpr::binary(op, std::move(lhs), primary());
      }
    }
    return lhs;
  }

  FilterExpr primary() {
    if (is_punct("(")) {
      advance();
      FilterExpr e = expression();
      expect_punct(")");
      return e;
    }
    if (is_punct("!")) return unary();
    const Token& t = peek();
    if (t.kind == Tok::kVar) return FilterExpr::variable(advance().text);
    if (t.kind == Tok::kIri || t.kind == Tok::kPname) return FilterExpr::constant_term(iri(advance()));
    if (auto lit = literal()) return FilterExpr::constant_term(std::move(*lit));
    if (t.kind == Tok::kWord) return call();
    fail("expected filter operand");
  }

  FilterExpr call() {
    Token name = advance();
    FilterExpr::Op op;
    if (name.text == "STRSTARTS") {
      op = FilterExpr::Op::kStrStarts;
    } else if (name.text == "CONTAINS") {
      op = FilterExpr::Op::kContains;
    } else {
      unsupported("filter function " + name.text);
    }
    expect_punct("(");
    FilterExpr a = expression();
    expect_punct(",");
    FilterExpr b = expression();
    expect_punct(")");
    return FilterExpr::binary(op, std::move(a), std::move(b));
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::map<std::string, std::string> prefixes_;
};

std::string indent_patterns(const std::vector<TriplePattern>& patterns, const std::vector<FilterExpr>& filters,
                            const std::string& indent) {
  std::string out;
  for (const auto& tp : patterns) out += indent + tp.to_string() + " .\n";
  for (const auto& f : filters) out += indent + "FILTER(" + f.to_string() + ")\n";
  return out;
}

}  // namespace

InterestExpression parse_interest(std::string_view text, InterestMeta meta) {
  InterestExpression out;
  out.id = std::move(meta.id);
  out.source = std::move(meta.source);
  out.target = std::move(meta.target);
  Parser(Lexer(text).run()).parse(out);
  validate_interest(out);
  return out;
}

std::string to_string(const InterestExpression& i) {
  std::string out = "SELECT * WHERE {\n";
  out += indent_patterns(i.bgp.patterns, i.bgp.filters, "  ");
  if (!i.ogp.patterns.empty() || !i.ogp.filters.empty()) {
    out += "  OPTIONAL {\n";
    out += indent_patterns(i.ogp.patterns, i.ogp.filters, "    ");
    out += "  }\n";
  }
  out += "}\n";
  return out;
}

}  // namespace irap
