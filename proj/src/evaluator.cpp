#include "irap/evaluator.hpp"

namespace irap {

DeletionResult evaluate_deletions(const InterestExpression& i, const Graph& d, const TripleView& target,
                                  const MatchLimits& limits) {
  DeletionResult out;
  out.candidates = generate_candidates(i, d, limits);
  out.assertion = assert_candidates(i, out.candidates, target, nullptr, limits);
  const auto& at = out.assertion;

  for (std::size_t w = 0; w < at.completed.size(); ++w) {
    if (!at.completed[w]) continue;
    for (const auto& t : at.full_triples[w]) {
      if (d.contains(t)) out.r.insert(t);
    }
  }
  out.r_i = subtract(out.candidates.all(), out.r);

  // Residue guard: a completion stays in the target while it still belongs
  // to a full match that survives the removal of r.
  ExcludingView remaining(target, out.r);
  for (const auto& t : subtract(at.all_completions(), out.r)) {
    if (!participates_in_full_match(i, t, remaining, limits)) out.r_prime.insert(t);
  }
  return out;
}

AdditionResult evaluate_additions(const InterestExpression& i, const Graph& a_in, const Graph& pi,
                                  const TripleView& context, const MatchLimits& limits) {
  AdditionResult out;
  Graph incoming = unite(a_in, pi);
  GraphIndex incoming_idx(incoming);
  out.candidates = generate_candidates(i, incoming, limits);
  out.assertion = assert_candidates(i, out.candidates, context, &incoming_idx, limits);
  const auto& at = out.assertion;

  for (std::size_t w = 0; w < at.completed.size(); ++w) {
    if (at.completed[w]) out.a.insert_all(at.full_triples[w]);
  }
  out.a_i = subtract(out.candidates.all(), out.a);
  for (std::size_t w = 0; w < at.related.size(); ++w) {
    if (!at.completed[w]) out.a_prime.insert_all(at.related[w]);
  }
  out.a_prime.erase_all(out.a);
  return out;
}

Evaluation evaluate_interest(const InterestExpression& i, const Changeset& cs, const TripleView& target,
                             const Graph& pi, const MatchLimits& limits) {
  Evaluation e;
  e.deletion = evaluate_deletions(i, cs.removed, target, limits);
  const auto& del = e.deletion;

  ExcludingView context(target, del.r);
  Graph surviving_pi = subtract(pi, cs.removed);
  e.addition = evaluate_additions(i, cs.added, surviving_pi, context, limits);
  const auto& add = e.addition;

  e.interesting.removed = unite(del.r, del.r_prime);
  e.interesting.added = add.a;

  e.pi.removed = del.r_i;
  for (const auto& t : pi) {
    if (del.r.contains(t) || add.a.contains(t) || cs.removed.contains(t)) e.pi.removed.insert(t);
  }
  e.pi.added = subtract(unite(add.a_i, del.r_prime), add.a);
  return e;
}

Graph init_slice(const InterestExpression& i, const Graph& dump, const MatchLimits& limits) {
  GraphIndex idx(dump);
  return full_match_triples(i, idx, limits);
}

}  // namespace irap
