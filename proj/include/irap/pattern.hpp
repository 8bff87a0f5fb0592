#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "irap/rdf.hpp"

namespace irap {

struct Variable {
  std::string name;  // without the leading '?'

  friend bool operator==(const Variable&, const Variable&) = default;
  friend auto operator<=>(const Variable&, const Variable&) = default;
};

using PatternTerm = std::variant<Term, Variable>;

inline const Variable* as_variable(const PatternTerm& t) { return std::get_if<Variable>(&t); }
inline const Term* as_term(const PatternTerm& t) { return std::get_if<Term>(&t); }

/// Partial solution mapping from variable names to terms.
class Binding {
 public:
  using Entry = std::pair<std::string, Term>;

  const Term* get(std::string_view var) const;
  bool contains(std::string_view var) const { return get(var) != nullptr; }
  /// Binds `var`; returns false if it is already bound to a different term.
  bool bind(std::string_view var, const Term& value);

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  /// Restriction to the given variable names.
  Binding restrict_to(const std::vector<std::string>& vars) const;
  std::string to_string() const;

  friend bool operator==(const Binding&, const Binding&) = default;
  friend auto operator<=>(const Binding&, const Binding&) = default;

 private:
  std::vector<Entry> entries_;  // sorted by name
};

struct TriplePattern {
  PatternTerm subject;
  PatternTerm predicate;
  PatternTerm object;

  TriplePattern() = default;
  /// Throws std::invalid_argument if the predicate is neither an IRI nor a variable.
  TriplePattern(PatternTerm s, PatternTerm p, PatternTerm o);

  /// Distinct variable names in subject, predicate, object order.
  std::vector<std::string> variables() const;
  /// True if `t` unifies with this pattern on its own (repeated variables must agree).
  bool matches(const Triple& t) const;
  std::string to_string() const;

  friend bool operator==(const TriplePattern&, const TriplePattern&) = default;
};

/// Extends `mu` so that the pattern instantiates to `t`, or nullopt if impossible.
std::optional<Binding> unify(const TriplePattern& tp, const Triple& t, const Binding& mu);
/// The position term after substituting `mu`; nullptr if it is an unbound variable.
const Term* resolve(const PatternTerm& pt, const Binding& mu);
/// Ground triple for `tp` under `mu`, or nullopt if some variable is unbound
/// or a bound term cannot occupy its position.
std::optional<Triple> instantiate(const TriplePattern& tp, const Binding& mu);

/// Filter expression tree. Leaves are variables or constants.
struct FilterExpr {
  enum class Op { kOr, kAnd, kNot, kEq, kNe, kLt, kLe, kGt, kGe, kStrStarts, kContains, kVar, kConst };

  Op op = Op::kConst;
  std::vector<FilterExpr> args;
  std::string var;  // kVar
  Term constant;    // kConst

  static FilterExpr variable(std::string name);
  static FilterExpr constant_term(Term t);
  static FilterExpr unary(Op op, FilterExpr a);
  static FilterExpr binary(Op op, FilterExpr a, FilterExpr b);

  void collect_variables(std::vector<std::string>& out) const;
  std::string to_string() const;

  friend bool operator==(const FilterExpr&, const FilterExpr&) = default;
};

/// SPARQL-style evaluation: an unbound variable or a type error makes the
/// expression an error, and an error is treated as false.
bool eval_filter(const FilterExpr& f, const Binding& mu);

struct Bgp {
  std::vector<TriplePattern> patterns;
  std::vector<FilterExpr> filters;

  friend bool operator==(const Bgp&, const Bgp&) = default;
};

struct Ogp {
  std::vector<TriplePattern> patterns;
  std::vector<FilterExpr> filters;

  bool empty() const { return patterns.empty(); }
  friend bool operator==(const Ogp&, const Ogp&) = default;
};

struct InterestExpression {
  std::string id;
  std::string source;  // changeset root IRI or path
  std::string target;  // store path or IRI
  Bgp bgp;
  Ogp ogp;

  friend bool operator==(const InterestExpression&, const InterestExpression&) = default;
};

/// Two patterns are adjacent if they share a variable or a ground term.
bool patterns_adjacent(const TriplePattern& a, const TriplePattern& b);
/// Connected components of the pattern adjacency graph, each sorted ascending.
std::vector<std::vector<std::size_t>> pattern_components(const std::vector<TriplePattern>& patterns);
bool check_non_disjoint(const Bgp& b);

/// Throws ValidationError if the BGP is empty or disjoint, or an OGP pattern
/// shares no variable with the BGP.
void validate_interest(const InterestExpression& i);

struct InterestMeta {
  std::string id;
  std::string source;
  std::string target;
};

/// Parses the SPARQL-shaped interest grammar and validates the result.
InterestExpression parse_interest(std::string_view text, InterestMeta meta = {});
/// Prefix-free rendering that parses back to an equal expression.
std::string to_string(const InterestExpression& i);

}  // namespace irap
