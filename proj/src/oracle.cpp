#include "irap/oracle.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>

#include "irap/error.hpp"
#include "irap/ntriples.hpp"

namespace irap::oracle {

namespace {

// Naive backtracking: every pattern is tried against every triple of `v`.
void brute_force(const std::vector<TriplePattern>& patterns, std::size_t k, const Binding& mu, const Graph& v,
                 std::vector<Triple>& chosen, const std::function<void(const Binding&, const std::vector<Triple>&)>& emit) {
  if (k == patterns.size()) {
    emit(mu, chosen);
    return;
  }
  for (const Triple& t : v) {
    auto next = unify(patterns[k], t, mu);
    if (!next) continue;
    chosen.push_back(t);
    brute_force(patterns, k + 1, *next, v, chosen, emit);
    chosen.pop_back();
  }
}

bool all_pass(const std::vector<FilterExpr>& filters, const Binding& mu) {
  return std::all_of(filters.begin(), filters.end(), [&](const FilterExpr& f) { return eval_filter(f, mu); });
}

bool subset_connected(const std::vector<TriplePattern>& patterns, std::uint32_t mask) {
  std::uint32_t first = mask & (~mask + 1);
  std::uint32_t reached = first;
  bool grew = true;
  while (grew) {
    grew = false;
    for (std::size_t a = 0; a < patterns.size(); ++a) {
      if (!(reached & (1u << a))) continue;
      for (std::size_t b = 0; b < patterns.size(); ++b) {
        std::uint32_t bit = 1u << b;
        if ((mask & bit) && !(reached & bit) && patterns_adjacent(patterns[a], patterns[b])) {
          reached |= bit;
          grew = true;
        }
      }
    }
  }
  return reached == mask;
}

template <typename T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& items) {
  return items[std::uniform_int_distribution<std::size_t>(0, items.size() - 1)(rng)];
}

int uniform(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
bool chance(std::mt19937_64& rng, double p) { return std::bernoulli_distribution(p)(rng); }

std::string ex(const std::string& local) { return std::string(kEx) + local; }
Term ex_term(const std::string& local) { return Term::iri(ex(local)); }
Term rdf_type() { return Term::iri(vocab::kRdfType); }
Term int_lit(int v) { return Term::typed_literal(std::to_string(v), vocab::kXsdInteger); }

// --- workload vocabulary -------------------------------------------------

struct Vocab {
  int teams;
  int leagues;
  int noise_predicates;
};

std::vector<Triple> athlete_triples(std::mt19937_64& rng, int id, const Vocab& voc) {
  Term e = ex_term("e" + std::to_string(id));
  std::vector<Triple> out;
  out.emplace_back(e, rdf_type(), ex_term(chance(rng, 0.85) ? "Athlete" : "Person"));
  if (chance(rng, 0.9)) out.emplace_back(e, ex_term("goals"), int_lit(uniform(rng, 0, 30)));
  if (chance(rng, 0.1)) out.emplace_back(e, ex_term("goals"), int_lit(uniform(rng, 31, 40)));
  if (chance(rng, 0.8)) out.emplace_back(e, ex_term("name"), Term::literal("Name " + std::to_string(id)));
  if (chance(rng, 0.8)) out.emplace_back(e, ex_term("team"), ex_term("t" + std::to_string(uniform(rng, 0, voc.teams - 1))));
  if (chance(rng, 0.5)) {
    std::string scheme = chance(rng, 0.8) ? "http://" : "ftp://";
    out.emplace_back(e, ex_term("homepage"), Term::literal(scheme + "e" + std::to_string(id) + ".example.org/"));
  }
  if (chance(rng, 0.5)) {
    out.emplace_back(e, ex_term("noise" + std::to_string(uniform(rng, 0, voc.noise_predicates - 1))),
                     int_lit(uniform(rng, 0, 99)));
  }
  return out;
}

std::vector<Triple> team_triples(std::mt19937_64& rng, int id, const Vocab& voc) {
  Term t = ex_term("t" + std::to_string(id));
  std::vector<Triple> out;
  out.emplace_back(t, rdf_type(), ex_term("Team"));
  if (chance(rng, 0.9)) out.emplace_back(t, ex_term("label"), Term::lang_literal("Team " + std::to_string(id), "en"));
  if (chance(rng, 0.85)) out.emplace_back(t, ex_term("league"), ex_term("l" + std::to_string(uniform(rng, 0, voc.leagues - 1))));
  return out;
}

Triple noise_triple(std::mt19937_64& rng, const Vocab& voc, int entities) {
  Term subject = chance(rng, 0.5) ? ex_term("x" + std::to_string(uniform(rng, 0, 4 * entities + 20)))
                                  : ex_term("e" + std::to_string(uniform(rng, 0, entities + 10)));
  Term predicate = ex_term("noise" + std::to_string(uniform(rng, 0, voc.noise_predicates - 1)));
  Term object = chance(rng, 0.5) ? int_lit(uniform(rng, 0, 999)) : Term::literal("n" + std::to_string(uniform(rng, 0, 999)));
  return Triple(subject, predicate, object);
}

// A triple that uses an interest predicate on a random subject.
Triple churn_triple(std::mt19937_64& rng, const Vocab& voc, int entities) {
  Term e = ex_term("e" + std::to_string(uniform(rng, 0, entities + 10)));
  Term t = ex_term("t" + std::to_string(uniform(rng, 0, voc.teams - 1)));
  switch (uniform(rng, 0, 6)) {
    case 0: return Triple(e, rdf_type(), ex_term("Athlete"));
    case 1: return Triple(e, ex_term("goals"), int_lit(uniform(rng, 0, 40)));
    case 2: return Triple(e, ex_term("name"), Term::literal("Name " + std::to_string(uniform(rng, 0, entities))));
    case 3: return Triple(e, ex_term("team"), t);
    case 4: return Triple(t, ex_term("label"), Term::lang_literal("Team " + std::to_string(uniform(rng, 0, 99)), "en"));
    case 5: return Triple(t, ex_term("league"), ex_term("l" + std::to_string(uniform(rng, 0, voc.leagues - 1))));
    default: return Triple(e, ex_term("homepage"), Term::literal("http://x" + std::to_string(uniform(rng, 0, 99)) + "/"));
  }
}

bool mentions(const std::vector<std::string>& patterns, const std::string& var) {
  for (const auto& p : patterns) {
    std::size_t start = 0;
    while (start <= p.size()) {
      std::size_t end = p.find(' ', start);
      if (end == std::string::npos) end = p.size();
      if (p.compare(start, end - start, var) == 0 && end - start == var.size()) return true;
      start = end + 1;
    }
  }
  return false;
}

std::vector<Triple> triples_with_subject(const Graph& g, const Term& s) {
  std::vector<Triple> out;
  for (const auto& t : g) {
    if (t.subject == s) out.push_back(t);
  }
  return out;
}

std::vector<Triple> triples_with_predicate(const Graph& g, const std::string& local) {
  Term p = ex_term(local);
  std::vector<Triple> out;
  for (const auto& t : g) {
    if (t.predicate == p) out.push_back(t);
  }
  return out;
}

// Removes pattern-matching triples outside each interest's slice until stable.
Graph prune_to_slices(Graph dump, const std::vector<InterestExpression>& interests) {
  while (true) {
    Graph keep_out;
    for (const auto& i : interests) {
      Graph s = slice(i, dump);
      for (const auto& t : dump) {
        if (s.contains(t)) continue;
        bool matches = false;
        for (const auto& tp : i.bgp.patterns) matches = matches || tp.matches(t);
        for (const auto& tp : i.ogp.patterns) matches = matches || tp.matches(t);
        if (matches) keep_out.insert(t);
      }
    }
    if (keep_out.empty()) return dump;
    dump.erase_all(keep_out);
  }
}

}  // namespace

Graph mirror_apply(const Graph& dump, const std::vector<Changeset>& changesets) {
  Graph v = dump;
  for (const auto& cs : changesets) v = apply_changeset(v, cs);
  return v;
}

Graph slice(const InterestExpression& i, const Graph& v) {
  Graph out;
  std::vector<Triple> chosen;
  brute_force(i.bgp.patterns, 0, Binding{}, v, chosen, [&](const Binding& mu, const std::vector<Triple>& bgp) {
    if (!all_pass(i.bgp.filters, mu)) return;
    for (const auto& t : bgp) out.insert(t);
    if (i.ogp.patterns.empty()) return;
    std::vector<Triple> opt_chosen;
    brute_force(i.ogp.patterns, 0, mu, v, opt_chosen, [&](const Binding& ext, const std::vector<Triple>& opt) {
      if (!all_pass(i.ogp.filters, ext)) return;
      for (const auto& t : opt) out.insert(t);
    });
  });
  return out;
}

CompareReport compare(const Graph& target, const Graph& expected) {
  return {subtract(expected, target), subtract(target, expected)};
}

Classification classify(const InterestExpression& i, const Graph& m) {
  const auto& patterns = i.bgp.patterns;
  const std::size_t n = patterns.size();
  std::map<Triple, std::size_t> best;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    if (!subset_connected(patterns, mask)) continue;
    std::vector<TriplePattern> subset;
    for (std::size_t j = 0; j < n; ++j) {
      if (mask & (1u << j)) subset.push_back(patterns[j]);
    }
    std::vector<Triple> chosen;
    brute_force(subset, 0, Binding{}, m, chosen, [&](const Binding&, const std::vector<Triple>& support) {
      for (const auto& t : support) best[t] = std::max(best[t], subset.size());
    });
  }
  Classification out;
  out.c.resize(n);
  for (const auto& [t, size] : best) out.c[n - size].insert(t);
  for (const auto& t : m) {
    if (best.count(t)) continue;
    for (const auto& tp : i.ogp.patterns) {
      if (tp.matches(t)) out.c_op.insert(t);
    }
  }
  return out;
}

InterestExpression random_interest(std::mt19937_64& rng, const std::string& id) {
  std::string prologue = "PREFIX ex: <" + std::string(kEx) + ">\n";
  std::vector<std::string> bgp;
  if (chance(rng, 0.5)) {
    // Star around an athlete.
    bgp.push_back(chance(rng, 0.85) ? "?a a ex:Athlete" : "?a ex:name ?n");
    std::vector<std::string> extra = {"?a ex:goals ?g", "?a ex:team ?t"};
    if (!mentions(bgp, "?n")) extra.push_back("?a ex:name ?n");
    std::shuffle(extra.begin(), extra.end(), rng);
    int count = uniform(rng, 1, static_cast<int>(extra.size()));
    for (int k = 0; k < count; ++k) {
      if (extra[k] == "?a ex:team ?t" && chance(rng, 0.25)) {
        bgp.push_back("?a ex:team ex:t" + std::to_string(uniform(rng, 0, 3)));
      } else {
        bgp.push_back(extra[k]);
      }
    }
  } else {
    // Chain athlete -> team -> league.
    int length = uniform(rng, 2, 4);
    if (length >= 3 || chance(rng, 0.5)) bgp.push_back(chance(rng, 0.5) ? "?a a ex:Athlete" : "?a ex:goals ?g");
    bgp.push_back("?a ex:team ?t");
    if (chance(rng, 0.5)) {
      bgp.push_back("?t ex:league ?l");
      bgp.push_back("?l ex:label ?ll");
    } else {
      bgp.push_back("?t ex:label ?tl");
      bgp.push_back("?t a ex:Team");
    }
    bgp.resize(std::min<std::size_t>(bgp.size(), length));
  }
  const bool has_a = mentions(bgp, "?a"), has_t = mentions(bgp, "?t"), has_g = mentions(bgp, "?g"),
             has_n = mentions(bgp, "?n"), has_tl = mentions(bgp, "?tl");

  std::vector<std::string> optional;
  std::vector<std::string> optional_filters;
  std::vector<std::string> filters;
  if (chance(rng, 0.5)) {
    std::vector<std::string> choices;
    if (has_a) choices.push_back("?a ex:homepage ?h");
    if (has_a && !has_n) choices.push_back("?a ex:name ?nm");
    if (has_t && !has_tl) choices.push_back("?t ex:label ?ol");
    if (!choices.empty()) {
      optional.push_back(pick(rng, choices));
      if (optional.back() == "?a ex:homepage ?h" && chance(rng, 0.4)) {
        optional_filters.push_back("STRSTARTS(?h, \"http://\")");
      }
    }
  }
  if (chance(rng, 0.5)) {
    std::vector<std::string> choices;
    if (has_g) {
      choices.push_back("?g > " + std::to_string(uniform(rng, 0, 20)));
      choices.push_back("?g <= " + std::to_string(uniform(rng, 5, 30)) + " && ?g != 7");
    }
    if (has_n) choices.push_back("!(?n = \"Name " + std::to_string(uniform(rng, 0, 10)) + "\")");
    if (has_tl) choices.push_back("CONTAINS(?tl, \"1\") || ?tl = \"Team 2\"@en");
    if (!choices.empty()) filters.push_back(pick(rng, choices));
  }

  std::string text = prologue + "SELECT * WHERE {\n";
  for (const auto& p : bgp) text += "  " + p + " .\n";
  for (const auto& f : filters) text += "  FILTER(" + f + ")\n";
  if (!optional.empty()) {
    text += "  OPTIONAL { " + optional.front() + " .";
    for (const auto& f : optional_filters) text += " FILTER(" + f + ")";
    text += " }\n";
  }
  text += "}\n";
  return parse_interest(text, InterestMeta{id, "", ""});
}

Workload generate_workload(std::uint64_t seed, const WorkloadParams& params) {
  std::mt19937_64 rng(seed);
  Workload w;
  w.seed = seed;
  w.params = params;
  Vocab voc{std::max(1, params.teams), std::max(1, params.teams / 2), std::max(1, params.noise_predicates)};

  for (int k = 0; k < params.interests; ++k) w.interests.push_back(random_interest(rng, "i" + std::to_string(k)));

  Graph v;
  int next_entity = 0;
  std::vector<int> live;
  for (; next_entity < params.entities; ++next_entity) {
    for (auto& t : athlete_triples(rng, next_entity, voc)) v.insert(t);
    live.push_back(next_entity);
  }
  for (int k = 0; k < voc.teams; ++k) {
    for (auto& t : team_triples(rng, k, voc)) v.insert(t);
  }
  for (int k = 0; k < voc.leagues; ++k) {
    v.insert(Triple(ex_term("l" + std::to_string(k)), ex_term("label"), Term::literal("League " + std::to_string(k))));
  }
  for (int k = 0; k < params.entities / 2; ++k) v.insert(noise_triple(rng, voc, params.entities));
  w.dump = prune_to_slices(v, w.interests);
  v = w.dump;

  // Scheduled arrivals and departures for entities split across changesets.
  std::multimap<int, Triple> pending_add;
  std::multimap<int, Triple> pending_remove;

  for (int step = 0; step < params.changesets; ++step) {
    Graph next = v;
    int ops = uniform(rng, 1, std::max(1, params.max_changeset_ops));
    for (int op = 0; op < ops; ++op) {
      if (chance(rng, params.noise_ratio)) {
        if (chance(rng, 0.7)) {
          next.insert(noise_triple(rng, voc, params.entities));
        } else {
          auto noise = triples_with_predicate(next, "noise" + std::to_string(uniform(rng, 0, voc.noise_predicates - 1)));
          if (!noise.empty()) next.erase(pick(rng, noise));
        }
        continue;
      }
      switch (uniform(rng, 0, 7)) {
        case 0: {  // attribute update
          auto goals = triples_with_predicate(next, "goals");
          if (goals.empty()) break;
          Triple old = pick(rng, goals);
          next.erase(old);
          next.insert(Triple(old.subject, old.predicate, int_lit(uniform(rng, 0, 40))));
          break;
        }
        case 1: {  // entity arriving over several changesets
          auto triples = athlete_triples(rng, next_entity, voc);
          live.push_back(next_entity++);
          for (auto& t : triples) pending_add.emplace(step + uniform(rng, 0, 2), t);
          break;
        }
        case 2: {  // entity leaving over several changesets
          if (live.empty()) break;
          std::size_t idx = std::uniform_int_distribution<std::size_t>(0, live.size() - 1)(rng);
          Term e = ex_term("e" + std::to_string(live[idx]));
          live.erase(live.begin() + static_cast<std::ptrdiff_t>(idx));
          for (auto& t : triples_with_subject(next, e)) pending_remove.emplace(step + uniform(rng, 0, 2), t);
          break;
        }
        case 3: {  // optional triple toggled
          if (live.empty()) break;
          Term e = ex_term("e" + std::to_string(pick(rng, live)));
          Triple page(e, ex_term("homepage"),
                      Term::literal((chance(rng, 0.8) ? "http://" : "ftp://") + e.value().substr(std::string(kEx).size()) + ".example.org/"));
          auto existing = triples_with_subject(next, e);
          bool removed = false;
          for (const auto& t : existing) {
            if (t.predicate == page.predicate) {
              next.erase(t);
              removed = true;
            }
          }
          if (!removed) next.insert(page);
          break;
        }
        case 4: {  // team relabel or league move
          Term t = ex_term("t" + std::to_string(uniform(rng, 0, voc.teams - 1)));
          const char* pred = chance(rng, 0.5) ? "label" : "league";
          for (const auto& old : triples_with_subject(next, t)) {
            if (old.predicate == ex_term(pred)) next.erase(old);
          }
          if (chance(rng, 0.85)) {
            Term object = std::string(pred) == "label"
                              ? Term::lang_literal("Team " + std::to_string(uniform(rng, 0, 20)), "en")
                              : ex_term("l" + std::to_string(uniform(rng, 0, voc.leagues - 1)));
            next.insert(Triple(t, ex_term(pred), object));
          }
          break;
        }
        case 5: {  // second value for a functional-looking attribute
          if (live.empty()) break;
          Term e = ex_term("e" + std::to_string(pick(rng, live)));
          next.insert(Triple(e, ex_term("goals"), int_lit(uniform(rng, 0, 40))));
          break;
        }
        default: {  // random churn over interest predicates
          if (chance(rng, 0.5)) {
            next.insert(churn_triple(rng, voc, next_entity));
          } else if (!next.empty()) {
            auto it = next.begin();
            std::advance(it, std::uniform_int_distribution<std::size_t>(0, next.size() - 1)(rng));
            next.erase(*it);
          }
          break;
        }
      }
    }
    for (auto [it, end] = pending_remove.equal_range(step); it != end; ++it) next.erase(it->second);
    for (auto [it, end] = pending_add.equal_range(step); it != end; ++it) next.insert(it->second);
    w.changesets.push_back(graph_diff(v, next));
    v = std::move(next);
  }
  return w;
}

Graph random_graph(std::mt19937_64& rng, int max_triples) {
  std::vector<Term> subjects, predicates, objects;
  for (int k = 0; k < 5; ++k) subjects.push_back(ex_term("s" + std::to_string(k)));
  for (int k = 0; k < 3; ++k) predicates.push_back(ex_term("p" + std::to_string(k)));
  predicates.push_back(rdf_type());
  objects = subjects;
  for (int k = 0; k < 3; ++k) objects.push_back(Term::literal(std::to_string(k)));
  objects.push_back(Term::lang_literal("x", "en"));
  Graph g;
  int count = uniform(rng, 0, max_triples);
  for (int k = 0; k < count; ++k) g.insert(Triple(pick(rng, subjects), pick(rng, predicates), pick(rng, objects)));
  return g;
}

SmallCase random_small_case(std::mt19937_64& rng, int max_triples, int max_patterns) {
  std::vector<PatternTerm> nodes, preds, vars;
  for (int k = 0; k < 4; ++k) vars.push_back(Variable{"v" + std::to_string(k)});
  for (int k = 0; k < 5; ++k) nodes.push_back(ex_term("s" + std::to_string(k)));
  for (int k = 0; k < 3; ++k) preds.push_back(ex_term("p" + std::to_string(k)));
  preds.push_back(rdf_type());

  auto node = [&]() -> PatternTerm { return chance(rng, 0.7) ? pick(rng, vars) : pick(rng, nodes); };
  auto object = [&]() -> PatternTerm {
    if (chance(rng, 0.15)) return Term::literal(std::to_string(uniform(rng, 0, 2)));
    return node();
  };
  auto predicate = [&]() -> PatternTerm { return chance(rng, 0.15) ? pick(rng, vars) : pick(rng, preds); };

  while (true) {
    InterestExpression i;
    i.id = "small";
    int n = uniform(rng, 1, max_patterns);
    for (int k = 0; k < n; ++k) {
      TriplePattern tp(node(), predicate(), object());
      if (k > 0) {
        // Share a subject/object term with an earlier pattern.
        const TriplePattern& prev = i.bgp.patterns[uniform(rng, 0, k - 1)];
        PatternTerm shared = chance(rng, 0.5) ? prev.subject : prev.object;
        if (as_term(shared) && as_term(shared)->is_literal()) shared = prev.subject;
        if (chance(rng, 0.5)) {
          tp.subject = shared;
        } else {
          tp.object = shared;
        }
      }
      i.bgp.patterns.push_back(tp);
    }
    if (chance(rng, 0.4)) {
      std::vector<std::string> bgp_vars;
      for (const auto& tp : i.bgp.patterns) {
        for (const auto& v : tp.variables()) bgp_vars.push_back(v);
      }
      if (!bgp_vars.empty()) {
        PatternTerm anchor = Variable{pick(rng, bgp_vars)};
        TriplePattern tp(anchor, pick(rng, preds), object());
        if (chance(rng, 0.5) && !as_term(tp.object)) std::swap(tp.subject, tp.object);
        i.ogp.patterns.push_back(tp);
      }
    }
    try {
      validate_interest(i);
    } catch (const ValidationError&) {
      continue;
    }
    return {std::move(i), random_graph(rng, max_triples)};
  }
}

std::vector<std::string> export_changesets(const std::vector<Changeset>& changesets,
                                           const std::filesystem::path& root) {
  std::vector<std::string> keys;
  for (std::size_t k = 0; k < changesets.size(); ++k) {
    int hour_index = static_cast<int>(k / 10);
    int serial = static_cast<int>(k % 10) + 1;
    int day = 1 + hour_index / 24;
    int hour = hour_index % 24;
    char dir[32];
    std::snprintf(dir, sizeof dir, "2015/01/%02d/%02d", day, hour);
    char name[16];
    std::snprintf(name, sizeof name, "%06d", serial);
    auto folder = root / dir;
    std::filesystem::create_directories(folder);
    const auto& cs = changesets[k];
    if (!cs.removed.empty() || cs.added.empty()) {
      std::ofstream(folder / (std::string(name) + ".removed.nt"), std::ios::binary) << serialize_ntriples(cs.removed);
    }
    if (!cs.added.empty()) {
      std::ofstream(folder / (std::string(name) + ".added.nt"), std::ios::binary) << serialize_ntriples(cs.added);
    }
    char key[32];
    std::snprintf(key, sizeof key, "2015-01-%02d-%02d-%06d", day, hour, serial);
    keys.push_back(key);
  }
  return keys;
}

}  // namespace irap::oracle
