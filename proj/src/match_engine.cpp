#include "irap/match_engine.hpp"

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <utility>

#include "irap/error.hpp"

namespace irap {

namespace {

PatternMask full_mask(std::size_t n) { return n >= 32 ? ~PatternMask{0} : (PatternMask{1} << n) - 1; }

bool filters_pass(const std::vector<FilterExpr>& filters, const Binding& mu) {
  for (const auto& f : filters) {
    if (!eval_filter(f, mu)) return false;
  }
  return true;
}

// Selectivity estimate for a pattern under a binding: bound subjects and
// objects narrow a scan far more than a bound predicate.
int bound_score(const TriplePattern& tp, const Binding& mu) {
  int score = 0;
  if (resolve(tp.subject, mu)) score += 4;
  if (resolve(tp.object, mu)) score += 3;
  if (resolve(tp.predicate, mu)) score += 1;
  return score;
}

bool scan_pattern(const TripleView& view, const TriplePattern& tp, const Binding& mu, TripleView::Visitor visit) {
  return view.scan(resolve(tp.subject, mu), resolve(tp.predicate, mu), resolve(tp.object, mu), visit);
}

class Joiner {
 public:
  Joiner(const std::vector<TriplePattern>& patterns, PatternMask todo, const TripleView& view, SolutionVisitor visit,
         const MatchLimits& limits)
      : patterns_(patterns), todo_(todo), view_(view), visit_(visit), limits_(limits), slots_(patterns.size()) {}

  bool run(const Binding& mu) { return step(todo_, mu); }

 private:
  bool step(PatternMask remaining, const Binding& mu) {
    if (remaining == 0) return emit(mu);
    std::size_t pick = patterns_.size();
    int best = -1;
    for (std::size_t j = 0; j < patterns_.size(); ++j) {
      if (!(remaining & (PatternMask{1} << j))) continue;
      int score = bound_score(patterns_[j], mu);
      if (score > best) {
        best = score;
        pick = j;
      }
    }
    const TriplePattern& tp = patterns_[pick];
    PatternMask rest = remaining & ~(PatternMask{1} << pick);
    return scan_pattern(view_, tp, mu, [&](const Triple& t) {
      if (++steps_ > limits_.max_states) {
        throw ResourceLimitError("join exceeded " + std::to_string(limits_.max_states) + " steps");
      }
      auto next = unify(tp, t, mu);
      if (!next) return true;
      slots_[pick] = t;
      return step(rest, *next);
    });
  }

  bool emit(const Binding& mu) {
    std::vector<Triple> triples;
    for (std::size_t j = 0; j < patterns_.size(); ++j) {
      if (todo_ & (PatternMask{1} << j)) triples.push_back(slots_[j]);
    }
    return visit_(mu, triples);
  }

  const std::vector<TriplePattern>& patterns_;
  PatternMask todo_;
  const TripleView& view_;
  SolutionVisitor visit_;
  const MatchLimits& limits_;
  std::vector<Triple> slots_;
  std::size_t steps_ = 0;
};

// Full BGP matches extending `mu` where only the patterns in `todo` are
// looked up in the view; the rest must already be ground under `mu`.
bool complete_bgp(const InterestExpression& i, PatternMask todo, const Binding& mu, const TripleView& view,
                  SolutionVisitor visit, const MatchLimits& limits) {
  return for_each_extension(
      i.bgp.patterns, todo, mu, view,
      [&](const Binding& full, const std::vector<Triple>&) {
        if (!filters_pass(i.bgp.filters, full)) return true;
        std::vector<Triple> triples;
        triples.reserve(i.bgp.patterns.size());
        for (const auto& tp : i.bgp.patterns) {
          auto t = instantiate(tp, full);
          if (!t) return true;
          triples.push_back(std::move(*t));
        }
        return visit(full, triples);
      },
      limits);
}

std::vector<PatternMask> adjacency(const std::vector<TriplePattern>& patterns) {
  std::vector<PatternMask> adj(patterns.size(), 0);
  for (std::size_t a = 0; a < patterns.size(); ++a) {
    for (std::size_t b = 0; b < patterns.size(); ++b) {
      if (a != b && patterns_adjacent(patterns[a], patterns[b])) adj[a] |= PatternMask{1} << b;
    }
  }
  return adj;
}

struct State {
  PatternMask mask;
  Binding binding;
  friend auto operator<=>(const State&, const State&) = default;
};

// Breadth-first growth of partial matches along pattern connectivity, seeded
// from every triple of `m` that matches a BGP pattern.
std::vector<PartialMatch> grow_partial_matches(const Bgp& b, const Ogp& op, const GraphIndex& m,
                                               const MatchLimits& limits) {
  const auto& patterns = b.patterns;
  const std::size_t n = patterns.size();
  if (n > 32) throw ValidationError(ValidationError::Kind::kInvalid, "BGP exceeds 32 patterns");
  const auto adj = adjacency(patterns);

  std::set<State> seen;
  std::deque<const State*> queue;
  auto visit_state = [&](PatternMask mask, Binding mu) {
    auto [it, inserted] = seen.insert(State{mask, std::move(mu)});
    if (!inserted) return;
    if (seen.size() > limits.max_states) {
      throw ResourceLimitError("partial matches exceeded " + std::to_string(limits.max_states));
    }
    queue.push_back(&*it);
  };

  for (const Triple& t : m.graph()) {
    for (std::size_t j = 0; j < n; ++j) {
      if (auto mu = unify(patterns[j], t, Binding{})) visit_state(PatternMask{1} << j, std::move(*mu));
    }
  }

  std::vector<PartialMatch> out;
  while (!queue.empty()) {
    const State& s = *queue.front();
    queue.pop_front();
    bool extended = false;
    for (std::size_t j = 0; j < n; ++j) {
      PatternMask bit = PatternMask{1} << j;
      if ((s.mask & bit) || !(adj[j] & s.mask)) continue;
      scan_pattern(m, patterns[j], s.binding, [&](const Triple& t) {
        if (auto mu = unify(patterns[j], t, s.binding)) {
          extended = true;
          visit_state(s.mask | bit, std::move(*mu));
        }
        return true;
      });
    }

    PartialMatch pm;
    pm.binding = s.binding;
    pm.matched = s.mask;
    pm.maximal = !extended;
    for (std::size_t j = 0; j < n; ++j) {
      if (s.mask & (PatternMask{1} << j)) pm.support.push_back(*instantiate(patterns[j], s.binding));
    }
    if (pm.maximal) {
      for (std::size_t j = 0; j < op.patterns.size(); ++j) {
        scan_pattern(m, op.patterns[j], s.binding, [&](const Triple& t) {
          if (unify(op.patterns[j], t, s.binding)) {
            pm.matched_op |= PatternMask{1} << j;
            pm.support.push_back(t);
          }
          return true;
        });
      }
    }
    out.push_back(std::move(pm));
  }
  return out;
}

}  // namespace

Graph CandidateTuple::all() const {
  Graph out = c_op;
  for (const auto& g : c) out.insert_all(g);
  return out;
}

Graph AssertionTuple::all_completions() const {
  Graph out = cp_op;
  for (const auto& g : cp) out.insert_all(g);
  return out;
}

bool for_each_extension(const std::vector<TriplePattern>& patterns, PatternMask todo, const Binding& mu,
                        const TripleView& view, SolutionVisitor visit, const MatchLimits& limits) {
  Joiner joiner(patterns, todo & full_mask(patterns.size()), view, visit, limits);
  return joiner.run(mu);
}

bool for_each_full_match(const InterestExpression& i, const Binding& mu, const TripleView& view,
                         SolutionVisitor visit, const MatchLimits& limits) {
  return complete_bgp(i, full_mask(i.bgp.patterns.size()), mu, view, visit, limits);
}

bool for_each_optional_extension(const InterestExpression& i, const Binding& mu, const TripleView& view,
                                 SolutionVisitor visit, const MatchLimits& limits) {
  if (i.ogp.patterns.empty()) return true;
  return for_each_extension(
      i.ogp.patterns, full_mask(i.ogp.patterns.size()), mu, view,
      [&](const Binding& ext, const std::vector<Triple>& triples) {
        return !filters_pass(i.ogp.filters, ext) || visit(ext, triples);
      },
      limits);
}

std::vector<PartialMatch> enumerate_partial_matches(const Bgp& b, const Ogp& op, const Graph& m,
                                                    const MatchLimits& limits) {
  GraphIndex idx(m);
  auto all = grow_partial_matches(b, op, idx, limits);
  std::vector<PartialMatch> out;
  for (auto& pm : all) {
    if (pm.maximal) out.push_back(std::move(pm));
  }
  return out;
}

CandidateTuple generate_candidates(const InterestExpression& i, const Graph& m, const MatchLimits& limits) {
  const std::size_t n = i.bgp.patterns.size();
  GraphIndex idx(m);
  CandidateTuple ct;
  ct.c.resize(n);
  ct.witnesses = grow_partial_matches(i.bgp, i.ogp, idx, limits);

  std::map<Triple, int> best;
  for (const auto& w : ct.witnesses) {
    int size = mask_size(w.matched);
    for (int k = 0; k < size; ++k) {
      auto [it, inserted] = best.emplace(w.support[k], size);
      if (!inserted && it->second < size) it->second = size;
    }
  }
  for (const auto& [t, size] : best) ct.c[n - size].insert(t);

  for (const Triple& t : m) {
    for (std::size_t j = 0; j < i.ogp.patterns.size(); ++j) {
      auto mu = unify(i.ogp.patterns[j], t, Binding{});
      if (!mu) continue;
      if (!best.count(t)) ct.c_op.insert(t);
      PartialMatch pm;
      pm.binding = std::move(*mu);
      pm.matched_op = PatternMask{1} << j;
      pm.support.push_back(t);
      pm.maximal = true;
      ct.witnesses.push_back(std::move(pm));
    }
  }
  return ct;
}

AssertionTuple assert_candidates(const InterestExpression& i, const CandidateTuple& ct, const TripleView& target,
                                 const TripleView* changeset, const MatchLimits& limits) {
  const std::size_t n = i.bgp.patterns.size();
  const PatternMask all = full_mask(n);
  std::optional<UnionView> joined;
  if (changeset) joined.emplace(target, *changeset);
  const TripleView& view = joined ? static_cast<const TripleView&>(*joined) : target;
  auto target_side = [&](const Triple& t) { return !changeset || !changeset->contains(t); };

  AssertionTuple at;
  at.cp.resize(n);
  at.completed.assign(ct.witnesses.size(), false);
  at.full_triples.resize(ct.witnesses.size());
  at.related.resize(ct.witnesses.size());

  for (std::size_t w = 0; w < ct.witnesses.size(); ++w) {
    const PartialMatch& pm = ct.witnesses[w];
    const bool pure_optional = pm.matched == 0;
    Graph full;
    complete_bgp(
        i, all & ~pm.matched, pm.binding, view,
        [&](const Binding& mu, const std::vector<Triple>& bgp_triples) {
          Graph optional;
          bool extended = false;
          for_each_optional_extension(
              i, mu, view,
              [&](const Binding&, const std::vector<Triple>& triples) {
                extended = true;
                for (const auto& t : triples) optional.insert(t);
                return true;
              },
              limits);
          if (pure_optional && !extended) return true;
          for (const auto& t : bgp_triples) full.insert(t);
          full.insert_all(optional);
          return true;
        },
        limits);

    if (!full.empty()) {
      // Audit: the witness support plus its completions must contain a full match.
      Graph check = full;
      for (const auto& t : pm.support) check.insert(t);
      GraphIndex check_idx(check);
      bool confirmed = !for_each_full_match(
          i, pm.binding, check_idx, [](const Binding&, const std::vector<Triple>&) { return false; }, limits);
      if (confirmed) {
        at.completed[w] = true;
        Graph& slot = pm.matched == all ? at.cp_op : at.cp[pure_optional ? 0 : n - mask_size(pm.matched)];
        std::set<Triple> support(pm.support.begin(), pm.support.end());
        for (const auto& t : full) {
          if (!support.count(t) && target_side(t)) slot.insert(t);
        }
        at.full_triples[w] = std::move(full);
        continue;
      }
    }

    for (std::size_t j = 0; j < n; ++j) {
      if (pm.matched & (PatternMask{1} << j)) continue;
      const TriplePattern& tp = i.bgp.patterns[j];
      bool shares = false;
      for (const auto& v : tp.variables()) shares = shares || pm.binding.contains(v);
      if (!shares) continue;
      scan_pattern(target, tp, pm.binding, [&](const Triple& t) {
        if (target_side(t)) at.related[w].insert(t);
        return true;
      });
    }
  }
  return at;
}

bool participates_in_full_match(const InterestExpression& i, const Triple& t, const TripleView& view,
                                const MatchLimits& limits) {
  auto stop = [](const Binding&, const std::vector<Triple>&) { return false; };
  for (const auto& tp : i.bgp.patterns) {
    auto mu = unify(tp, t, Binding{});
    if (mu && !for_each_full_match(i, *mu, view, stop, limits)) return true;
  }
  for (const auto& tp : i.ogp.patterns) {
    auto mu = unify(tp, t, Binding{});
    if (!mu) continue;
    bool found = !for_each_full_match(
        i, *mu, view,
        [&](const Binding& full, const std::vector<Triple>&) {
          return for_each_optional_extension(i, full, view, stop, limits);
        },
        limits);
    if (found) return true;
  }
  return false;
}

Graph full_match_triples(const InterestExpression& i, const TripleView& view, const MatchLimits& limits) {
  Graph out;
  for_each_full_match(
      i, Binding{}, view,
      [&](const Binding& mu, const std::vector<Triple>& triples) {
        for (const auto& t : triples) out.insert(t);
        for_each_optional_extension(
            i, mu, view,
            [&](const Binding&, const std::vector<Triple>& opt) {
              for (const auto& t : opt) out.insert(t);
              return true;
            },
            limits);
        return true;
      },
      limits);
  return out;
}

}  // namespace irap
