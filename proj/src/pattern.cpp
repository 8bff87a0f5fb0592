#include "irap/pattern.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <stdexcept>

#include "irap/error.hpp"

namespace irap {

// ---------------------------------------------------------------------------
// Binding

const Term* Binding::get(std::string_view var) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), var,
                             [](const Entry& e, std::string_view v) { return e.first < v; });
  if (it == entries_.end() || it->first != var) return nullptr;
  return &it->second;
}

bool Binding::bind(std::string_view var, const Term& value) {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), var,
                             [](const Entry& e, std::string_view v) { return e.first < v; });
  if (it != entries_.end() && it->first == var) return it->second == value;
  entries_.insert(it, Entry{std::string(var), value});
  return true;
}

Binding Binding::restrict_to(const std::vector<std::string>& vars) const {
  Binding out;
  for (const auto& [name, value] : entries_) {
    if (std::find(vars.begin(), vars.end(), name) != vars.end()) out.entries_.emplace_back(name, value);
  }
  return out;
}

std::string Binding::to_string() const {
  std::string out = "{";
  for (const auto& [name, value] : entries_) {
    if (out.size() > 1) out += ", ";
    out += "?" + name + "=" + value.nt();
  }
  return out + "}";
}

// ---------------------------------------------------------------------------
// TriplePattern

namespace {

std::string pattern_term_string(const PatternTerm& pt) {
  if (const auto* v = as_variable(pt)) return "?" + v->name;
  return std::get<Term>(pt).nt();
}

bool unify_position(const PatternTerm& pt, const Term& value, Binding& mu) {
  if (const auto* term = as_term(pt)) return *term == value;
  return mu.bind(std::get<Variable>(pt).name, value);
}

}  // namespace

TriplePattern::TriplePattern(PatternTerm s, PatternTerm p, PatternTerm o)
    : subject(std::move(s)), predicate(std::move(p)), object(std::move(o)) {
  if (const auto* t = as_term(predicate); t && !t->is_iri()) {
    throw std::invalid_argument("pattern predicate must be an IRI or variable");
  }
  if (const auto* t = as_term(subject); t && t->is_literal()) {
    throw std::invalid_argument("pattern subject cannot be a literal");
  }
}

std::vector<std::string> TriplePattern::variables() const {
  std::vector<std::string> out;
  for (const PatternTerm* pt : {&subject, &predicate, &object}) {
    if (const auto* v = as_variable(*pt)) {
      if (std::find(out.begin(), out.end(), v->name) == out.end()) out.push_back(v->name);
    }
  }
  return out;
}

bool TriplePattern::matches(const Triple& t) const { return unify(*this, t, Binding{}).has_value(); }

std::string TriplePattern::to_string() const {
  return pattern_term_string(subject) + " " + pattern_term_string(predicate) + " " + pattern_term_string(object);
}

std::optional<Binding> unify(const TriplePattern& tp, const Triple& t, const Binding& mu) {
  Binding out = mu;
  if (!unify_position(tp.subject, t.subject, out)) return std::nullopt;
  if (!unify_position(tp.predicate, t.predicate, out)) return std::nullopt;
  if (!unify_position(tp.object, t.object, out)) return std::nullopt;
  return out;
}

const Term* resolve(const PatternTerm& pt, const Binding& mu) {
  if (const auto* term = as_term(pt)) return term;
  return mu.get(std::get<Variable>(pt).name);
}

std::optional<Triple> instantiate(const TriplePattern& tp, const Binding& mu) {
  const Term* s = resolve(tp.subject, mu);
  const Term* p = resolve(tp.predicate, mu);
  const Term* o = resolve(tp.object, mu);
  if (!s || !p || !o || s->is_literal() || !p->is_iri()) return std::nullopt;
  return Triple(*s, *p, *o);
}

// ---------------------------------------------------------------------------
// Filters

FilterExpr FilterExpr::variable(std::string name) {
  FilterExpr f;
  f.op = Op::kVar;
  f.var = std::move(name);
  return f;
}

FilterExpr FilterExpr::constant_term(Term t) {
  FilterExpr f;
  f.op = Op::kConst;
  f.constant = std::move(t);
  return f;
}

FilterExpr FilterExpr::unary(Op op, FilterExpr a) {
  FilterExpr f;
  f.op = op;
  f.args.push_back(std::move(a));
  return f;
}

FilterExpr FilterExpr::binary(Op op, FilterExpr a, FilterExpr b) {
  FilterExpr f;
  f.op = op;
  f.args.push_back(std::move(a));
  f.args.push_back(std::move(b));
  return f;
}

void FilterExpr::collect_variables(std::vector<std::string>& out) const {
  if (op == Op::kVar && std::find(out.begin(), out.end(), var) == out.end()) out.push_back(var);
  for (const auto& a : args) a.collect_variables(out);
}

std::string FilterExpr::to_string() const {
  auto bin = [this](const char* sym) { return "(" + args[0].to_string() + " " + sym + " " + args[1].to_string() + ")"; };
  switch (op) {
    case Op::kOr: return bin("||");
    case Op::kAnd: return bin("&&");
    case Op::kNot: return "(!" + args[0].to_string() + ")";
    case Op::kEq: return bin("=");
    case Op::kNe: return bin("!=");
    case Op::kLt: return bin("<");
    case Op::kLe: return bin("<=");
    case Op::kGt: return bin(">");
    case Op::kGe: return bin(">=");
    case Op::kStrStarts: return "STRSTARTS(" + args[0].to_string() + ", " + args[1].to_string() + ")";
    case Op::kContains: return "CONTAINS(" + args[0].to_string() + ", " + args[1].to_string() + ")";
    case Op::kVar: return "?" + var;
    case Op::kConst: return constant.nt();
  }
  return {};
}

namespace {

bool is_numeric_datatype(std::string_view dt) {
  if (dt.substr(0, vocab::kXsd.size()) != vocab::kXsd) return false;
  std::string_view local = dt.substr(vocab::kXsd.size());
  static constexpr std::string_view kNumeric[] = {
      "integer", "decimal", "float", "double", "int", "long", "short", "byte",
      "nonNegativeInteger", "positiveInteger", "negativeInteger", "nonPositiveInteger",
      "unsignedLong", "unsignedInt", "unsignedShort", "unsignedByte"};
  return std::find(std::begin(kNumeric), std::end(kNumeric), local) != std::end(kNumeric);
}

bool is_integer_datatype(std::string_view dt) {
  std::string_view local = dt.substr(vocab::kXsd.size());
  return local != "decimal" && local != "float" && local != "double";
}

std::optional<long double> parse_number(const std::string& lexical, bool integer_only) {
  if (lexical.empty()) return std::nullopt;
  if (integer_only) {
    std::size_t i = (lexical[0] == '+' || lexical[0] == '-') ? 1 : 0;
    if (i == lexical.size()) return std::nullopt;
    for (; i < lexical.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(lexical[i]))) return std::nullopt;
    }
  }
  if (std::isspace(static_cast<unsigned char>(lexical[0]))) return std::nullopt;
  char* end = nullptr;
  long double v = std::strtold(lexical.c_str(), &end);
  if (end != lexical.c_str() + lexical.size()) return std::nullopt;
  return v;
}

// Result of evaluating a sub-expression.
struct Value {
  enum class Kind { kError, kBool, kTerm } kind = Kind::kError;
  bool boolean = false;
  Term term;

  static Value error() { return {}; }
  static Value of(bool b) { return Value{Kind::kBool, b, {}}; }
  static Value of(Term t) { return Value{Kind::kTerm, false, std::move(t)}; }
};

std::optional<long double> numeric_value(const Value& v) {
  if (v.kind != Value::Kind::kTerm || !v.term.is_literal()) return std::nullopt;
  std::string dt = v.term.datatype();
  if (!is_numeric_datatype(dt)) return std::nullopt;
  return parse_number(v.term.value(), is_integer_datatype(dt));
}

// Simple literals and xsd:string literals.
bool is_plain_string(const Term& t) {
  if (!t.is_literal() || !t.language().empty()) return false;
  std::string dt = t.datatype();
  return dt.empty() || dt == vocab::kXsdString;
}

bool is_string_like(const Term& t) { return t.is_literal() && (is_plain_string(t) || !t.language().empty()); }

std::optional<bool> boolean_literal(const Term& t) {
  if (!t.is_literal() || t.datatype() != vocab::kXsdBoolean) return std::nullopt;
  std::string lex = t.value();
  if (lex == "true" || lex == "1") return true;
  if (lex == "false" || lex == "0") return false;
  return std::nullopt;
}

std::optional<bool> effective_boolean(const Value& v) {
  if (v.kind == Value::Kind::kBool) return v.boolean;
  if (v.kind == Value::Kind::kError || !v.term.is_literal()) return std::nullopt;
  const Term& t = v.term;
  if (t.datatype() == vocab::kXsdBoolean) return boolean_literal(t);
  if (is_numeric_datatype(t.datatype())) {
    auto n = numeric_value(v);
    if (!n) return false;
    return *n != 0 && !std::isnan(*n);
  }
  if (is_string_like(t)) return !t.value().empty();
  return std::nullopt;
}

// Three-way comparison; nullopt when the operands are not comparable.
std::optional<int> compare_values(const Value& a, const Value& b) {
  if (a.kind == Value::Kind::kError || b.kind == Value::Kind::kError) return std::nullopt;
  if (a.kind == Value::Kind::kBool || b.kind == Value::Kind::kBool) {
    auto x = a.kind == Value::Kind::kBool ? std::optional<bool>(a.boolean) : boolean_literal(a.term);
    auto y = b.kind == Value::Kind::kBool ? std::optional<bool>(b.boolean) : boolean_literal(b.term);
    if (!x || !y) return std::nullopt;
    return static_cast<int>(*x) - static_cast<int>(*y);
  }
  if (auto x = numeric_value(a)) {
    auto y = numeric_value(b);
    if (!y || std::isnan(*x) || std::isnan(*y)) return std::nullopt;
    return *x < *y ? -1 : (*x > *y ? 1 : 0);
  }
  if (is_plain_string(a.term) && is_plain_string(b.term)) {
    int c = a.term.value().compare(b.term.value());
    return c < 0 ? -1 : (c > 0 ? 1 : 0);
  }
  if (auto x = boolean_literal(a.term)) {
    auto y = boolean_literal(b.term);
    if (!y) return std::nullopt;
    return static_cast<int>(*x) - static_cast<int>(*y);
  }
  return std::nullopt;
}

Value eval(const FilterExpr& f, const Binding& mu);

Value eval_equality(const FilterExpr& f, const Binding& mu, bool negate) {
  Value a = eval(f.args[0], mu);
  Value b = eval(f.args[1], mu);
  if (a.kind == Value::Kind::kError || b.kind == Value::Kind::kError) return Value::error();
  if (auto c = compare_values(a, b)) return Value::of((*c == 0) != negate);
  if (a.kind == Value::Kind::kTerm && b.kind == Value::Kind::kTerm) {
    if (a.term == b.term) return Value::of(!negate);
    // Two literals of an unknown datatype cannot be proven different.
    if (a.term.is_literal() && b.term.is_literal() && !a.term.datatype().empty() &&
        a.term.datatype() == b.term.datatype()) {
      return Value::error();
    }
    return Value::of(negate);
  }
  return Value::error();
}

Value eval_ordering(const FilterExpr& f, const Binding& mu) {
  auto c = compare_values(eval(f.args[0], mu), eval(f.args[1], mu));
  if (!c) return Value::error();
  switch (f.op) {
    case FilterExpr::Op::kLt: return Value::of(*c < 0);
    case FilterExpr::Op::kLe: return Value::of(*c <= 0);
    case FilterExpr::Op::kGt: return Value::of(*c > 0);
    default: return Value::of(*c >= 0);
  }
}

Value eval_string_test(const FilterExpr& f, const Binding& mu) {
  Value a = eval(f.args[0], mu);
  Value b = eval(f.args[1], mu);
  if (a.kind != Value::Kind::kTerm || b.kind != Value::Kind::kTerm) return Value::error();
  if (!is_string_like(a.term) || !is_string_like(b.term)) return Value::error();
  // Argument compatibility: the second argument must be plain or share the first's language.
  if (!b.term.language().empty() && b.term.language() != a.term.language()) return Value::error();
  std::string haystack = a.term.value();
  std::string needle = b.term.value();
  if (f.op == FilterExpr::Op::kStrStarts) return Value::of(haystack.compare(0, needle.size(), needle) == 0);
  return Value::of(haystack.find(needle) != std::string::npos);
}

Value eval(const FilterExpr& f, const Binding& mu) {
  using Op = FilterExpr::Op;
  switch (f.op) {
    case Op::kVar: {
      const Term* t = mu.get(f.var);
      return t ? Value::of(*t) : Value::error();
    }
    case Op::kConst: return Value::of(f.constant);
    case Op::kNot: {
      auto b = effective_boolean(eval(f.args[0], mu));
      return b ? Value::of(!*b) : Value::error();
    }
    case Op::kOr: {
      auto x = effective_boolean(eval(f.args[0], mu));
      auto y = effective_boolean(eval(f.args[1], mu));
      if ((x && *x) || (y && *y)) return Value::of(true);
      if (x && y) return Value::of(false);
      return Value::error();
    }
    case Op::kAnd: {
      auto x = effective_boolean(eval(f.args[0], mu));
      auto y = effective_boolean(eval(f.args[1], mu));
      if ((x && !*x) || (y && !*y)) return Value::of(false);
      if (x && y) return Value::of(true);
      return Value::error();
    }
    case Op::kEq: return eval_equality(f, mu, false);
    case Op::kNe: return eval_equality(f, mu, true);
    case Op::kLt:
    case Op::kLe:
    case Op::kGt:
    case Op::kGe: return eval_ordering(f, mu);
    case Op::kStrStarts:
    case Op::kContains: return eval_string_test(f, mu);
  }
  return Value::error();
}

}  // namespace

bool eval_filter(const FilterExpr& f, const Binding& mu) {
  auto b = effective_boolean(eval(f, mu));
  return b.value_or(false);
}

// ---------------------------------------------------------------------------
// Connectivity

bool patterns_adjacent(const TriplePattern& a, const TriplePattern& b) {
  for (const PatternTerm* x : {&a.subject, &a.predicate, &a.object}) {
    for (const PatternTerm* y : {&b.subject, &b.predicate, &b.object}) {
      if (*x == *y) return true;
    }
  }
  return false;
}

std::vector<std::vector<std::size_t>> pattern_components(const std::vector<TriplePattern>& patterns) {
  std::vector<std::size_t> parent(patterns.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    for (std::size_t j = i + 1; j < patterns.size(); ++j) {
      if (patterns_adjacent(patterns[i], patterns[j])) parent[find(i)] = find(j);
    }
  }
  std::vector<std::vector<std::size_t>> components;
  std::vector<std::size_t> slot(patterns.size(), SIZE_MAX);
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    std::size_t root = find(i);
    if (slot[root] == SIZE_MAX) {
      slot[root] = components.size();
      components.emplace_back();
    }
    components[slot[root]].push_back(i);
  }
  return components;
}

bool check_non_disjoint(const Bgp& b) { return pattern_components(b.patterns).size() <= 1; }

void validate_interest(const InterestExpression& i) {
  if (i.bgp.patterns.empty()) throw ValidationError(ValidationError::Kind::kInvalid, "BGP has no triple patterns");
  if (i.bgp.patterns.size() > 32) {
    throw ValidationError(ValidationError::Kind::kInvalid, "BGP has more than 32 triple patterns");
  }
  auto components = pattern_components(i.bgp.patterns);
  if (components.size() > 1) {
    std::string msg = "BGP is disjoint; components:";
    for (const auto& c : components) {
      msg += " {";
      for (std::size_t k = 0; k < c.size(); ++k) {
        if (k) msg += " . ";
        msg += i.bgp.patterns[c[k]].to_string();
      }
      msg += "}";
    }
    throw ValidationError(ValidationError::Kind::kDisjointBgp, msg);
  }
  std::vector<std::string> bgp_vars;
  for (const auto& tp : i.bgp.patterns) {
    for (auto& v : tp.variables()) {
      if (std::find(bgp_vars.begin(), bgp_vars.end(), v) == bgp_vars.end()) bgp_vars.push_back(v);
    }
  }
  for (const auto& tp : i.ogp.patterns) {
    auto vars = tp.variables();
    bool shared = std::any_of(vars.begin(), vars.end(), [&](const std::string& v) {
      return std::find(bgp_vars.begin(), bgp_vars.end(), v) != bgp_vars.end();
    });
    if (!shared) {
      throw ValidationError(ValidationError::Kind::kDisconnectedOptional,
                            "OPTIONAL pattern shares no variable with the BGP: " + tp.to_string());
    }
  }
}

}  // namespace irap
