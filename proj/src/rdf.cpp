#include "irap/rdf.hpp"

#include <algorithm>
#include <cctype>
#include <iterator>
#include <stdexcept>

#include "text_util.hpp"

namespace irap {

namespace {

bool iri_char_needs_escape(unsigned char c) {
  return c <= 0x20 || c == '<' || c == '>' || c == '"' || c == '{' || c == '}' || c == '|' || c == '^' ||
         c == '`' || c == '\\';
}

void append_iri(std::string& out, std::string_view iri) {
  out.push_back('<');
  for (unsigned char c : iri) {
    if (iri_char_needs_escape(c)) {
      detail::append_uchar(out, c);
    } else {
      out.push_back(static_cast<char>(c));
    }
  }
  out.push_back('>');
}

bool valid_language_tag(std::string_view tag) {
  if (tag.empty()) return false;
  std::size_t i = 0;
  std::size_t first = 0;
  while (i < tag.size() && std::isalpha(static_cast<unsigned char>(tag[i]))) ++i;
  if (i == first) return false;
  while (i < tag.size()) {
    if (tag[i] != '-') return false;
    ++i;
    std::size_t start = i;
    while (i < tag.size() && std::isalnum(static_cast<unsigned char>(tag[i]))) ++i;
    if (i == start) return false;
  }
  return true;
}

}  // namespace

bool is_absolute_iri(std::string_view iri) {
  // scheme ":" with scheme = ALPHA *( ALPHA / DIGIT / "+" / "-" / "." )
  if (iri.empty() || !std::isalpha(static_cast<unsigned char>(iri[0]))) return false;
  for (std::size_t i = 1; i < iri.size(); ++i) {
    unsigned char c = iri[i];
    if (c == ':') return true;
    if (!std::isalnum(c) && c != '+' && c != '-' && c != '.') return false;
  }
  return false;
}

Term Term::iri(std::string_view iri) {
  if (!is_absolute_iri(iri)) throw std::invalid_argument("IRI is not absolute: " + std::string(iri));
  std::string nt;
  nt.reserve(iri.size() + 2);
  append_iri(nt, iri);
  return Term(Kind::kIri, std::move(nt), 0);
}

Term Term::blank(std::string_view label) {
  if (label.empty()) throw std::invalid_argument("empty blank node label");
  for (unsigned char c : label) {
    if (!std::isalnum(c) && c != '_' && c != '-' && c != '.' && c < 0x80) {
      throw std::invalid_argument("invalid blank node label: " + std::string(label));
    }
  }
  return Term(Kind::kBlank, "_:" + std::string(label), 0);
}

Term Term::literal(std::string_view lexical) {
  std::string nt = "\"";
  detail::append_escaped_literal(nt, lexical);
  auto close = static_cast<std::uint32_t>(nt.size());
  nt.push_back('"');
  return Term(Kind::kLiteral, std::move(nt), close);
}

Term Term::typed_literal(std::string_view lexical, std::string_view datatype_iri) {
  if (!is_absolute_iri(datatype_iri)) {
    throw std::invalid_argument("datatype IRI is not absolute: " + std::string(datatype_iri));
  }
  Term t = literal(lexical);
  t.nt_ += "^^";
  append_iri(t.nt_, datatype_iri);
  return t;
}

Term Term::lang_literal(std::string_view lexical, std::string_view language) {
  if (!valid_language_tag(language)) throw std::invalid_argument("invalid language tag: " + std::string(language));
  Term t = literal(lexical);
  t.nt_.push_back('@');
  std::transform(language.begin(), language.end(), std::back_inserter(t.nt_),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return t;
}

std::string Term::value() const {
  switch (kind_) {
    case Kind::kIri:
      return detail::unescape(std::string_view(nt_).substr(1, nt_.size() - 2));
    case Kind::kBlank:
      return nt_.substr(2);
    case Kind::kLiteral:
      return detail::unescape(std::string_view(nt_).substr(1, close_ - 1));
  }
  return {};
}

std::string Term::datatype() const {
  if (kind_ != Kind::kLiteral) return {};
  std::string_view rest = std::string_view(nt_).substr(close_ + 1);
  if (rest.size() < 4 || rest.substr(0, 2) != "^^") return {};
  return detail::unescape(rest.substr(3, rest.size() - 4));
}

std::string Term::language() const {
  if (kind_ != Kind::kLiteral) return {};
  std::string_view rest = std::string_view(nt_).substr(close_ + 1);
  if (rest.empty() || rest[0] != '@') return {};
  return std::string(rest.substr(1));
}

Triple::Triple(Term s, Term p, Term o) : subject(std::move(s)), predicate(std::move(p)), object(std::move(o)) {
  if (subject.is_literal()) throw std::invalid_argument("literal in subject position: " + subject.nt());
  if (!predicate.is_iri()) throw std::invalid_argument("predicate must be an IRI: " + predicate.nt());
}

std::string Triple::to_ntriples() const {
  std::string line;
  line.reserve(subject.nt().size() + predicate.nt().size() + object.nt().size() + 4);
  line += subject.nt();
  line += ' ';
  line += predicate.nt();
  line += ' ';
  line += object.nt();
  line += " .";
  return line;
}

void Graph::erase_all(const Graph& other) {
  if (other.size() * 4 < triples_.size()) {
    for (const auto& t : other) triples_.erase(t);
    return;
  }
  Set kept;
  std::set_difference(triples_.begin(), triples_.end(), other.begin(), other.end(),
                      std::inserter(kept, kept.end()));
  triples_ = std::move(kept);
}

Graph unite(const Graph& a, const Graph& b) {
  Graph out = a;
  out.insert_all(b);
  return out;
}

Graph subtract(const Graph& a, const Graph& b) {
  Graph out;
  for (const auto& t : a) {
    if (!b.contains(t)) out.insert(t);
  }
  return out;
}

Graph intersect(const Graph& a, const Graph& b) {
  const Graph& small = a.size() <= b.size() ? a : b;
  const Graph& large = a.size() <= b.size() ? b : a;
  Graph out;
  for (const auto& t : small) {
    if (large.contains(t)) out.insert(t);
  }
  return out;
}

Changeset graph_diff(const Graph& v_old, const Graph& v_new) {
  return Changeset{subtract(v_old, v_new), subtract(v_new, v_old)};
}

Graph apply_changeset(const Graph& v, const Changeset& cs) {
  Graph out = v;
  out.erase_all(cs.removed);
  out.insert_all(cs.added);
  return out;
}

}  // namespace irap
