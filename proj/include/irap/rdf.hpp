#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <set>
#include <string>
#include <string_view>

namespace irap {

namespace vocab {
inline constexpr std::string_view kRdfType = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
inline constexpr std::string_view kXsd = "http://www.w3.org/2001/XMLSchema#";
inline constexpr std::string_view kXsdString = "http://www.w3.org/2001/XMLSchema#string";
inline constexpr std::string_view kXsdInteger = "http://www.w3.org/2001/XMLSchema#integer";
inline constexpr std::string_view kXsdDecimal = "http://www.w3.org/2001/XMLSchema#decimal";
inline constexpr std::string_view kXsdDouble = "http://www.w3.org/2001/XMLSchema#double";
inline constexpr std::string_view kXsdBoolean = "http://www.w3.org/2001/XMLSchema#boolean";
}  // namespace vocab

/// An RDF term held in its canonical N-Triples encoding.
///
/// Identity is the encoded text: two terms are equal iff their canonical
/// encodings are byte-identical. There is no value-space normalisation
/// ("1" and "01" differ, xsd:int and xsd:integer differ); the only
/// normalisation is lower-casing of language tags.
class Term {
 public:
  enum class Kind : std::uint8_t { kIri, kBlank, kLiteral };

  Term() = default;

  /// Throws std::invalid_argument unless `iri` is absolute.
  static Term iri(std::string_view iri);
  static Term blank(std::string_view label);
  static Term literal(std::string_view lexical);
  static Term typed_literal(std::string_view lexical, std::string_view datatype_iri);
  static Term lang_literal(std::string_view lexical, std::string_view language);

  Kind kind() const { return kind_; }
  bool is_iri() const { return kind_ == Kind::kIri; }
  bool is_blank() const { return kind_ == Kind::kBlank; }
  bool is_literal() const { return kind_ == Kind::kLiteral; }

  /// Canonical N-Triples text, e.g. `<http://a>`, `_:b0`, `"x"@en`.
  const std::string& nt() const { return nt_; }

  /// IRI without angle brackets; blank label without `_:`; lexical form for literals.
  std::string value() const;
  /// Datatype IRI of a typed literal, empty otherwise.
  std::string datatype() const;
  /// Lower-cased language tag, empty otherwise.
  std::string language() const;

  friend bool operator==(const Term& a, const Term& b) { return a.nt_ == b.nt_; }
  friend std::strong_ordering operator<=>(const Term& a, const Term& b) {
    return a.nt_.compare(b.nt_) <=> 0;
  }

 private:
  Term(Kind kind, std::string nt, std::uint32_t close) : kind_(kind), close_(close), nt_(std::move(nt)) {}

  Kind kind_ = Kind::kIri;
  // Index of the closing quote for literals.
  std::uint32_t close_ = 0;
  std::string nt_ = "<>";
};

bool is_absolute_iri(std::string_view iri);

struct Triple {
  Term subject;
  Term predicate;
  Term object;

  Triple() = default;
  /// Throws std::invalid_argument on a literal subject or non-IRI predicate.
  Triple(Term s, Term p, Term o);

  /// `<s> <p> <o> .` without trailing newline.
  std::string to_ntriples() const;

  friend bool operator==(const Triple&, const Triple&) = default;
  friend auto operator<=>(const Triple&, const Triple&) = default;
};

/// A set of ground triples.
class Graph {
 public:
  using Set = std::set<Triple>;
  using const_iterator = Set::const_iterator;

  Graph() = default;
  Graph(std::initializer_list<Triple> triples) : triples_(triples) {}

  /// Returns false if the triple was already present.
  bool insert(const Triple& t) { return triples_.insert(t).second; }
  bool erase(const Triple& t) { return triples_.erase(t) > 0; }
  bool contains(const Triple& t) const { return triples_.count(t) > 0; }
  void insert_all(const Graph& other) { triples_.insert(other.begin(), other.end()); }
  void erase_all(const Graph& other);

  std::size_t size() const { return triples_.size(); }
  bool empty() const { return triples_.empty(); }
  const_iterator begin() const { return triples_.begin(); }
  const_iterator end() const { return triples_.end(); }
  void clear() { triples_.clear(); }

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  Set triples_;
};

Graph unite(const Graph& a, const Graph& b);
Graph subtract(const Graph& a, const Graph& b);
Graph intersect(const Graph& a, const Graph& b);

/// Ordered pair of removed and added triples.
struct Changeset {
  Graph removed;
  Graph added;

  bool empty() const { return removed.empty() && added.empty(); }
  friend bool operator==(const Changeset&, const Changeset&) = default;
};

/// ⟨old ∖ new, new ∖ old⟩
Changeset graph_diff(const Graph& v_old, const Graph& v_new);

/// (v ∖ removed) ∪ added; deletions are applied first.
Graph apply_changeset(const Graph& v, const Changeset& cs);

}  // namespace irap

template <>
struct std::hash<irap::Term> {
  std::size_t operator()(const irap::Term& t) const noexcept { return std::hash<std::string>{}(t.nt()); }
};

template <>
struct std::hash<irap::Triple> {
  std::size_t operator()(const irap::Triple& t) const noexcept {
    std::size_t h = std::hash<irap::Term>{}(t.subject);
    h = h * 1000003u ^ std::hash<irap::Term>{}(t.predicate);
    h = h * 1000003u ^ std::hash<irap::Term>{}(t.object);
    return h;
  }
};
