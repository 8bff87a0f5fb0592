#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <absl/functional/function_ref.h>

#include "irap/pattern.hpp"
#include "irap/rdf.hpp"
#include "irap/triple_view.hpp"

namespace irap {

struct MatchLimits {
  /// Upper bound on partial-match states (and join steps) per call.
  std::size_t max_states = 1'000'000;
};

using PatternMask = std::uint32_t;

inline int mask_size(PatternMask m) { return __builtin_popcount(m); }

struct PartialMatch {
  Binding binding;
  PatternMask matched = 0;     // indices into Bgp.patterns
  PatternMask matched_op = 0;  // indices into Ogp.patterns
  /// Triples witnessing the matched patterns, BGP first.
  std::vector<Triple> support;
  /// No connected extension exists within the matched graph.
  bool maximal = false;
};

/// Classification of a changeset against one interest.
struct CandidateTuple {
  /// c[k] holds triples whose best partial match covers n − k BGP patterns.
  std::vector<Graph> c;
  /// Triples matching only OGP patterns.
  Graph c_op;
  /// Every connected partial match, plus one pure-OGP match (matched = 0)
  /// per triple matching an OGP pattern.
  std::vector<PartialMatch> witnesses;

  /// Union of all c[k] and c_op.
  Graph all() const;
};

struct AssertionTuple {
  /// Target-side completions of full witnesses (optional-pattern triples only).
  Graph cp_op;
  /// cp[k], 0 < k < n: target-side completions of witnesses in c[k];
  /// cp[0]: target-side completions of pure-OGP witnesses.
  std::vector<Graph> cp;
  /// Parallel to CandidateTuple::witnesses.
  std::vector<bool> completed;
  /// Per completed witness: every triple of every full match extending it,
  /// with consistent optional-pattern triples.
  std::vector<Graph> full_triples;
  /// Per uncompleted witness: target triples matching a single missing
  /// pattern that shares a bound variable with the witness.
  std::vector<Graph> related;

  Graph all_completions() const;
};

/// Maximal partial matches of `b` over `m`, each extended with OGP triples of `m`.
std::vector<PartialMatch> enumerate_partial_matches(const Bgp& b, const Ogp& op, const Graph& m,
                                                    const MatchLimits& limits = {});

CandidateTuple generate_candidates(const InterestExpression& i, const Graph& m, const MatchLimits& limits = {});

/// Completes each witness against `target`. When `changeset` is given, joins
/// run over target ∪ changeset and only triples absent from `changeset` are
/// recorded in cp.
AssertionTuple assert_candidates(const InterestExpression& i, const CandidateTuple& ct, const TripleView& target,
                                 const TripleView* changeset = nullptr, const MatchLimits& limits = {});

/// One solution of a group of patterns: the extended binding and the triples
/// instantiating the group, in pattern order.
using SolutionVisitor = absl::FunctionRef<bool(const Binding&, const std::vector<Triple>&)>;

/// Enumerates extensions of `mu` that match every pattern whose bit is set in
/// `todo`, over `view`. Filters are not applied. Returns false if stopped.
bool for_each_extension(const std::vector<TriplePattern>& patterns, PatternMask todo, const Binding& mu,
                        const TripleView& view, SolutionVisitor visit, const MatchLimits& limits = {});

/// Enumerates full BGP matches extending `mu` that pass the BGP filters.
bool for_each_full_match(const InterestExpression& i, const Binding& mu, const TripleView& view,
                         SolutionVisitor visit, const MatchLimits& limits = {});

/// Enumerates OGP-group extensions of a full match binding that pass the OGP filters.
bool for_each_optional_extension(const InterestExpression& i, const Binding& mu, const TripleView& view,
                                 SolutionVisitor visit, const MatchLimits& limits = {});

/// True if `t` belongs to some full match over `view`, as a BGP triple or as
/// an OGP triple of the match.
bool participates_in_full_match(const InterestExpression& i, const Triple& t, const TripleView& view,
                                const MatchLimits& limits = {});

/// Every triple in a full match over `view`, plus consistent OGP triples.
Graph full_match_triples(const InterestExpression& i, const TripleView& view, const MatchLimits& limits = {});

}  // namespace irap
