#pragma once

#include <cstddef>

#include "irap/match_engine.hpp"
#include "irap/pattern.hpp"
#include "irap/rdf.hpp"
#include "irap/triple_view.hpp"

namespace irap {

struct DeletionResult {
  Graph r;        // interesting removed
  Graph r_i;      // potentially interesting removed
  Graph r_prime;  // target residue demoted to potentially interesting
  CandidateTuple candidates;
  AssertionTuple assertion;
};

struct AdditionResult {
  Graph a;        // interesting added
  Graph a_i;      // potentially interesting added
  Graph a_prime;  // target triples related to a_i; reported, never applied
  CandidateTuple candidates;
  AssertionTuple assertion;
};

struct InterestingChangeset {
  Graph removed;  // r ∪ r′
  Graph added;    // a
};

struct PIChangeset {
  Graph removed;
  Graph added;  // (a_i ∪ r′) ∖ a
};

struct Evaluation {
  DeletionResult deletion;
  AdditionResult addition;
  InterestingChangeset interesting;
  PIChangeset pi;
};

/// `target` is the target dataset before the changeset.
DeletionResult evaluate_deletions(const InterestExpression& i, const Graph& d, const TripleView& target,
                                  const MatchLimits& limits = {});

/// `pi` holds the potentially interesting triples still present after the
/// deletions; `context` is the target without the interesting removed triples.
AdditionResult evaluate_additions(const InterestExpression& i, const Graph& a_in, const Graph& pi,
                                  const TripleView& context, const MatchLimits& limits = {});

/// Deletions first, then additions against the target minus r.
Evaluation evaluate_interest(const InterestExpression& i, const Changeset& cs, const TripleView& target,
                             const Graph& pi, const MatchLimits& limits = {});

/// Slice of `dump`: every triple of a full match plus consistent optional triples.
Graph init_slice(const InterestExpression& i, const Graph& dump, const MatchLimits& limits = {.max_states = ~std::size_t{0}});

}  // namespace irap
