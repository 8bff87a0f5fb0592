#include <gtest/gtest.h>

#include <random>

#include "fixture_util.hpp"
#include "irap/error.hpp"
#include "irap/evaluator.hpp"
#include "irap/fault.hpp"
#include "irap/oracle.hpp"
#include "irap/propagate.hpp"
#include "irap/store.hpp"

namespace irap {
namespace {

using namespace irap::testing;

Graph pick(std::mt19937_64& rng, const Graph& g, double share) {
  std::bernoulli_distribution take(share);
  Graph out;
  for (const auto& t : g) {
    if (take(rng)) out.insert(t);
  }
  return out;
}

struct HookGuard {
  explicit HookGuard(fault::Hook h) { fault::set_hook(std::move(h)); }
  ~HookGuard() { fault::set_hook({}); }
};

fault::Hook crash_at(std::string name) {
  return [name](std::string_view p) {
    if (p == name) throw fault::SimulatedCrash(name);
  };
}

TEST(TripleStore, MatchesGraphModel) {
  std::mt19937_64 rng(7);
  TripleStore store;
  Graph model;
  for (int step = 0; step < 300; ++step) {
    Graph removed = pick(rng, model, 0.2);
    removed.insert_all(oracle::random_graph(rng, 3));
    Graph added = oracle::random_graph(rng, 8);
    Graph next = apply_changeset(model, {removed, added});
    auto counts = store.apply(removed, added);
    EXPECT_EQ(counts.removed, intersect(model, removed).size());
    EXPECT_EQ(counts.added, subtract(next, subtract(model, removed)).size());
    model = std::move(next);
    ASSERT_EQ(store.snapshot(), model) << "step " << step;
    ASSERT_EQ(store.size(), model.size());
  }
}

TEST(TripleStore, IndexesAgreeOnEveryPatternShape) {
  std::mt19937_64 rng(11);
  Graph g = oracle::random_graph(rng, 60);
  TripleStore store;
  store.load(g);
  GraphIndex reference(g);
  for (const auto& t : g) {
    for (int mask = 0; mask < 8; ++mask) {
      const Term* s = (mask & 1) ? &t.subject : nullptr;
      const Term* p = (mask & 2) ? &t.predicate : nullptr;
      const Term* o = (mask & 4) ? &t.object : nullptr;
      Graph got, want;
      store.scan(s, p, o, [&](const Triple& x) { return got.insert(x), true; });
      reference.scan(s, p, o, [&](const Triple& x) { return want.insert(x), true; });
      ASSERT_EQ(got, want);
      ASSERT_TRUE(got.contains(t));
    }
  }
}

TEST(TripleStore, MatchPatternBindsVariables) {
  RunningExample ex;
  TripleStore store;
  store.load(ex.target_t0);
  const auto& tp = ex.interest.bgp.patterns.at(1);
  auto matches = store.match_pattern(tp, {});
  Graph seen;
  for (const auto& [t, mu] : matches) {
    seen.insert(t);
    auto inst = instantiate(tp, mu);
    ASSERT_TRUE(inst.has_value());
    EXPECT_EQ(*inst, t);
  }
  Graph expected;
  for (const auto& t : ex.target_t0) {
    if (unify(tp, t, {})) expected.insert(t);
  }
  EXPECT_EQ(seen, expected);
}

TEST(TripleStore, UnknownTermsScanNothing) {
  TripleStore store;
  store.load({athlete("Marcel")});
  Term ghost = Term::iri("http://nowhere.example/x");
  bool visited = false;
  store.scan(&ghost, nullptr, nullptr, [&](const Triple&) { return visited = true; });
  EXPECT_FALSE(visited);
  EXPECT_FALSE(store.contains(athlete("Nobody")));
}

TEST(DurableStore, ReopenRestoresCommittedState) {
  TempDir dir;
  std::mt19937_64 rng(3);
  Graph model;
  {
    DurableStore store(dir.path());
    for (int k = 0; k < 40; ++k) {
      Changeset cs{pick(rng, model, 0.3), oracle::random_graph(rng, 6)};
      store.commit(cs.removed, cs.added);
      model = apply_changeset(model, cs);
    }
  }
  DurableStore reopened(dir.path());
  EXPECT_EQ(reopened.data().snapshot(), model);
  reopened.compact();
  DurableStore again(dir.path());
  EXPECT_EQ(again.data().snapshot(), model);
}

TEST(DurableStore, TornJournalTailIsDiscarded) {
  TempDir dir;
  Graph first{athlete("A"), goals("A", "1")};
  {
    DurableStore store(dir.path());
    store.commit({}, first);
    store.commit({goals("A", "1")}, {goals("A", "2")});
  }
  std::string journal = read_file(dir / "journal.log");
  auto last_begin = journal.rfind("BEGIN");
  ASSERT_NE(last_begin, std::string::npos);
  // Cut inside the second record, before its COMMIT line.
  write_file(dir / "journal.log", journal.substr(0, journal.size() - 10));
  {
    DurableStore store(dir.path());
    EXPECT_EQ(store.data().snapshot(), first);
    store.commit({}, {athlete("B")});
  }
  DurableStore store(dir.path());
  EXPECT_EQ(store.data().snapshot(), (Graph{athlete("A"), goals("A", "1"), athlete("B")}));
}

TEST(DurableStore, CorruptChecksumStopsReplay) {
  TempDir dir;
  {
    DurableStore store(dir.path());
    store.commit({}, {athlete("A")});
    store.commit({}, {athlete("B")});
  }
  std::string journal = read_file(dir / "journal.log");
  auto pos = journal.rfind("Athlete");
  ASSERT_NE(pos, std::string::npos);
  journal[pos] = 'X';
  write_file(dir / "journal.log", journal);
  DurableStore store(dir.path());
  EXPECT_EQ(store.data().snapshot(), (Graph{athlete("A")}));
}

TEST(DurableStore, ResetWritesSnapshotHeader) {
  TempDir dir;
  {
    DurableStore store(dir.path());
    store.commit({}, {athlete("A")});
    store.reset({athlete("Z")});
  }
  EXPECT_TRUE(read_file(dir / "snapshot.nt").starts_with("# irap-snapshot seq="));
  DurableStore store(dir.path());
  EXPECT_EQ(store.data().snapshot(), (Graph{athlete("Z")}));
}

class StorePairCrash : public ::testing::TestWithParam<const char*> {};

TEST_P(StorePairCrash, PendingIntentIsRedoneOnOpen) {
  TempDir dir;
  Changeset t_delta{{goals("A", "1")}, {goals("A", "2"), athlete("B")}};
  Changeset p_delta{{}, {goals("C", "3")}};
  {
    StorePair stores(dir / "target", dir / "pi");
    stores.reset({athlete("A"), goals("A", "1")}, {});
    HookGuard guard(crash_at(GetParam()));
    EXPECT_THROW(stores.commit(t_delta, p_delta), fault::SimulatedCrash);
  }
  StorePair stores(dir / "target", dir / "pi");
  EXPECT_EQ(stores.target().snapshot(), (Graph{athlete("A"), goals("A", "2"), athlete("B")}));
  EXPECT_EQ(stores.pi().snapshot(), (Graph{goals("C", "3")}));
  EXPECT_FALSE(std::filesystem::exists(dir / "pi" / "pending.txn"));
}

INSTANTIATE_TEST_SUITE_P(Points, StorePairCrash, ::testing::Values("intent-written", "target-committed", "pi-committed"));

TEST(StorePair, CrashBeforeIntentLeavesPriorState) {
  TempDir dir;
  {
    StorePair stores(dir / "target", dir / "pi");
    stores.reset({athlete("A")}, {goals("A", "1")});
  }
  write_file(dir / "pi" / "pending.txn", "T 0 1\n<http://x/s> <http://x/p> <http://x/o> .\n");
  StorePair stores(dir / "target", dir / "pi");
  EXPECT_EQ(stores.target().snapshot(), (Graph{athlete("A")}));
  EXPECT_EQ(stores.pi().snapshot(), (Graph{goals("A", "1")}));
}

TEST(UpdateStream, RunningExampleDocument) {
  RunningExample ex;
  GraphIndex target(ex.target_t0);
  auto e = evaluate_interest(ex.interest, {ex.removed, ex.added}, target, Graph{});
  std::string doc = export_update_stream(e.interesting);
  EXPECT_TRUE(doc.starts_with("DELETE DATA {\n"));
  auto insert_at = doc.find("};\nINSERT DATA {\n");
  ASSERT_NE(insert_at, std::string::npos);
  auto count_lines = [](std::string_view s) { return std::count(s.begin(), s.end(), '\n'); };
  EXPECT_EQ(count_lines(std::string_view(doc).substr(0, insert_at)), 1 + 5);
  EXPECT_EQ(count_lines(std::string_view(doc).substr(insert_at)), 3 + 5);

  Changeset parsed = parse_update_stream(doc);
  EXPECT_EQ(parsed, (Changeset{e.interesting.removed, e.interesting.added}));
  EXPECT_EQ(apply_changeset(ex.target_t0, parsed), ex.expected_target);
}

TEST(UpdateStream, EmptyChangesetHasTwoEmptyBlocks) {
  EXPECT_EQ(export_update_stream(Changeset{}), "DELETE DATA {\n};\nINSERT DATA {\n}\n");
  EXPECT_EQ(parse_update_stream(export_update_stream(Changeset{})), Changeset{});
}

TEST(UpdateStream, LinesAreSorted) {
  Changeset cs{{goals("Z", "1"), goals("A", "1")}, {athlete("Q"), athlete("B")}};
  std::string doc = export_update_stream(cs);
  EXPECT_LT(doc.find("/A>"), doc.find("/Z>"));
  EXPECT_LT(doc.find("/B>"), doc.find("/Q>"));
}

TEST(UpdateStream, MalformedInputThrows) {
  EXPECT_THROW(parse_update_stream("INSERT DATA {\n}\n"), ParseError);
  EXPECT_THROW(parse_update_stream("DELETE DATA {\nnot a triple\n};\nINSERT DATA {\n}\n"), ParseError);
}

TEST(Propagate, RunningExampleCountsAndStores) {
  RunningExample ex;
  TempDir dir;
  StorePair stores(dir / "target", dir / "pi");
  stores.reset(ex.target_t0, {});
  auto report = propagate(ex.interest, {ex.removed, ex.added}, stores, "2015-02-06-17-000001");
  EXPECT_EQ(report.removed_interesting, 5u);
  EXPECT_EQ(report.added_interesting, 5u);
  EXPECT_EQ(report.pi_removed, 0u);
  EXPECT_EQ(report.pi_added, 3u);
  EXPECT_EQ(report.total_removed, 4u);
  EXPECT_EQ(report.total_added, 7u);
  EXPECT_EQ(stores.target().snapshot(), ex.expected_target);
  EXPECT_EQ(stores.pi().snapshot(), ex.expected_pi);
  EXPECT_TRUE(report.to_line().starts_with("athlete\t2015-02-06-17-000001\t5\t5\t0\t3\t"));

  StorePair reopened(dir / "target", dir / "pi");
  EXPECT_EQ(reopened.target().snapshot(), ex.expected_target);
  EXPECT_EQ(reopened.pi().snapshot(), ex.expected_pi);
}

TEST(Propagate, DeleteBeforeAddKeepsTriple) {
  RunningExample ex;
  StorePair stores;
  stores.reset(ex.target_t0, {});
  Triple t = goals("Cristiano_Ronaldo", "96");
  propagate(ex.interest, {{t}, {t}}, stores);
  EXPECT_TRUE(stores.target().contains(t));
  EXPECT_EQ(stores.target().snapshot(), ex.target_t0);
}

TEST(Propagate, UninterestingChangesetLeavesStoresUntouched) {
  RunningExample ex;
  TempDir dir;
  StorePair stores(dir / "target", dir / "pi");
  stores.reset(ex.target_t0, {goals("Someone", "4")});
  std::string before_target = read_file(dir / "target" / "snapshot.nt");
  Term noise = Term::iri("http://example.org/noise");
  auto report = propagate(ex.interest,
                          {{Triple(dbr("X"), noise, dbr("Y"))}, {Triple(dbr("Y"), noise, Term::literal("n"))}}, stores);
  EXPECT_EQ(report.removed_interesting + report.added_interesting + report.pi_removed + report.pi_added, 0u);
  EXPECT_EQ(stores.target().snapshot(), ex.target_t0);
  EXPECT_EQ(stores.pi().snapshot(), (Graph{goals("Someone", "4")}));
  EXPECT_EQ(read_file(dir / "target" / "snapshot.nt"), before_target);
}

TEST(Propagate, PromotedTriplesLeavePi) {
  RunningExample ex;
  StorePair stores;
  stores.reset(ex.target_t0, {});
  propagate(ex.interest, {ex.removed, ex.added}, stores);
  // Arvid's goals arrive later and promote the waiting type triple.
  auto report = propagate(ex.interest, {{}, {goals("Arvid_Smit", "7")}}, stores);
  EXPECT_EQ(report.added_interesting, 2u);
  EXPECT_TRUE(stores.target().contains(athlete("Arvid_Smit")));
  EXPECT_FALSE(stores.pi().contains(athlete("Arvid_Smit")));
}

}  // namespace
}  // namespace irap
