#include <gtest/gtest.h>

#include "irap/evaluator.hpp"
#include "irap/oracle.hpp"
#include "irap/store.hpp"

namespace irap {
namespace {

bool in_vocabulary(const Term& t) {
  if (t.is_literal()) return t.datatype().empty() || t.datatype() == vocab::kXsdInteger;
  return t.is_iri() && (t.value().starts_with(oracle::kEx) || t.value() == vocab::kRdfType);
}

TEST(Workload, DeterministicInSeed) {
  auto a = oracle::generate_workload(42);
  auto b = oracle::generate_workload(42);
  EXPECT_EQ(a.dump, b.dump);
  EXPECT_EQ(a.changesets, b.changesets);
  EXPECT_EQ(a.interests, b.interests);
  EXPECT_NE(oracle::generate_workload(43).changesets, a.changesets);
}

TEST(Workload, ChangesetsStayInVocabulary) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    auto w = oracle::generate_workload(seed);
    ASSERT_EQ(w.changesets.size(), 20u);
    for (const auto& cs : w.changesets) {
      ASSERT_LE(cs.removed.size() + cs.added.size(), 200u);
      ASSERT_TRUE(intersect(cs.removed, cs.added).empty());
      for (const auto* g : {&cs.removed, &cs.added}) {
        for (const auto& t : *g) {
          ASSERT_TRUE(in_vocabulary(t.subject) && in_vocabulary(t.predicate) && in_vocabulary(t.object))
              << t.to_ntriples();
        }
      }
    }
  }
}

TEST(Workload, ChangesetsChainFromDump) {
  auto w = oracle::generate_workload(7);
  Graph v = w.dump;
  for (const auto& cs : w.changesets) {
    for (const auto& t : cs.removed) ASSERT_TRUE(v.contains(t));
    for (const auto& t : cs.added) ASSERT_FALSE(v.contains(t));
    v = apply_changeset(v, cs);
  }
  EXPECT_EQ(v, oracle::mirror_apply(w.dump, w.changesets));
}

TEST(Workload, DumpHoldsNoStrayMatchingTriples) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    auto w = oracle::generate_workload(seed, {.interests = 2});
    for (const auto& i : w.interests) {
      Graph slice = oracle::slice(i, w.dump);
      for (const auto& t : w.dump) {
        if (slice.contains(t)) continue;
        for (const auto& tp : i.bgp.patterns) ASSERT_FALSE(tp.matches(t)) << t.to_ntriples();
        for (const auto& tp : i.ogp.patterns) ASSERT_FALSE(tp.matches(t)) << t.to_ntriples();
      }
    }
  }
}

TEST(Workload, InterestShapes) {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 500; ++k) {
    auto i = oracle::random_interest(rng, "x");
    ASSERT_GE(i.bgp.patterns.size(), 2u);
    ASSERT_LE(i.bgp.patterns.size(), 4u);
    ASSERT_LE(i.ogp.patterns.size(), 1u);
    ASSERT_LE(i.bgp.filters.size(), 1u);
  }
}

TEST(Oracle, SliceOfRunningExampleShape) {
  auto i = parse_interest("PREFIX ex: <http://example.org/>\nSELECT * WHERE { ?a a ex:Athlete . ?a ex:goals ?g . "
                          "OPTIONAL { ?a ex:homepage ?h } }");
  auto e = [](const std::string& l) { return Term::iri(std::string(oracle::kEx) + l); };
  Triple type_a(e("a"), Term::iri(vocab::kRdfType), e("Athlete"));
  Triple goals_a(e("a"), e("goals"), Term::literal("1"));
  Triple page_a(e("a"), e("homepage"), Term::literal("http://a/"));
  Triple type_b(e("b"), Term::iri(vocab::kRdfType), e("Athlete"));
  Triple page_b(e("b"), e("homepage"), Term::literal("http://b/"));
  Graph v{type_a, goals_a, page_a, type_b, page_b};
  EXPECT_EQ(oracle::slice(i, v), (Graph{type_a, goals_a, page_a}));
  EXPECT_TRUE(oracle::slice(i, {}).empty());
  EXPECT_TRUE(oracle::slice(i, {page_a, page_b}).empty());
}

TEST(Oracle, CompareReportsBothSides) {
  auto e = [](const std::string& l) { return Term::iri(std::string(oracle::kEx) + l); };
  Triple t1(e("1"), e("p"), e("1")), t2(e("2"), e("p"), e("2"));
  auto r = oracle::compare({t1}, {t2});
  EXPECT_EQ(r.missing, Graph{t2});
  EXPECT_EQ(r.extra, Graph{t1});
  EXPECT_TRUE(oracle::compare({t1}, {t1}).equal());
}

TEST(Oracle, ExportedTreeFollowsLayout) {
  auto w = oracle::generate_workload(11);
  auto root = std::filesystem::temp_directory_path() / "irap-oracle-export";
  std::filesystem::remove_all(root);
  auto keys = oracle::export_changesets(w.changesets, root);
  EXPECT_EQ(keys.size(), w.changesets.size());
  EXPECT_EQ(keys.front(), "2015-01-01-00-000001");
  EXPECT_TRUE(std::is_sorted(keys.begin(), keys.end()));
  std::filesystem::remove_all(root);
}

}  // namespace
}  // namespace irap
