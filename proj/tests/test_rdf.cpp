#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "fixture_util.hpp"
#include "irap/ntriples.hpp"
#include "irap/oracle.hpp"
#include "irap/rdf.hpp"

namespace irap {
namespace {

using namespace irap::testing;

Triple spo(const std::string& s, const std::string& p, const std::string& o) {
  return Triple(Term::iri("http://x/" + s), Term::iri("http://x/" + p), Term::iri("http://x/" + o));
}

TEST(Term, CanonicalEncodings) {
  EXPECT_EQ(Term::iri("http://a/b").nt(), "<http://a/b>");
  EXPECT_EQ(Term::blank("b0").nt(), "_:b0");
  EXPECT_EQ(Term::literal("x").nt(), "\"x\"");
  EXPECT_EQ(Term::lang_literal("x", "EN-gb").nt(), "\"x\"@en-gb");
  EXPECT_EQ(Term::typed_literal("1", vocab::kXsdInteger).nt(), "\"1\"^^<http://www.w3.org/2001/XMLSchema#integer>");
  EXPECT_EQ(Term::literal("a\"b\\c\nd").nt(), "\"a\\\"b\\\\c\\nd\"");
  EXPECT_EQ(Term::literal("a\"b\\c\nd").value(), "a\"b\\c\nd");
}

TEST(Term, NoValueSpaceNormalisation) {
  EXPECT_NE(Term::typed_literal("1", vocab::kXsdInteger), Term::typed_literal("01", vocab::kXsdInteger));
  EXPECT_NE(Term::typed_literal("1", vocab::kXsdInteger),
            Term::typed_literal("1", "http://www.w3.org/2001/XMLSchema#int"));
  EXPECT_NE(Term::literal("x"), Term::lang_literal("x", "en"));
  EXPECT_EQ(Term::lang_literal("x", "EN"), Term::lang_literal("x", "en"));
}

TEST(Term, Accessors) {
  Term t = Term::typed_literal("216", vocab::kXsdInteger);
  EXPECT_TRUE(t.is_literal());
  EXPECT_EQ(t.value(), "216");
  EXPECT_EQ(t.datatype(), vocab::kXsdInteger);
  EXPECT_EQ(Term::lang_literal("Tor", "NL").language(), "nl");
  EXPECT_EQ(Term::iri("http://a/").value(), "http://a/");
  EXPECT_EQ(Term::blank("q").value(), "q");
}

TEST(Term, RelativeIriRejected) {
  EXPECT_THROW(Term::iri("relative/path"), std::invalid_argument);
  EXPECT_THROW(Term::iri(""), std::invalid_argument);
}

TEST(Triple, PositionConstraints) {
  Term lit = Term::literal("x");
  Term iri = Term::iri("http://a/");
  Term blank = Term::blank("b");
  EXPECT_THROW(Triple(lit, iri, iri), std::invalid_argument);
  EXPECT_THROW(Triple(iri, lit, iri), std::invalid_argument);
  EXPECT_THROW(Triple(iri, blank, iri), std::invalid_argument);
  EXPECT_NO_THROW(Triple(blank, iri, lit));
}

TEST(Graph, SetSemantics) {
  Graph g;
  EXPECT_TRUE(g.insert(spo("a", "p", "b")));
  EXPECT_FALSE(g.insert(spo("a", "p", "b")));
  EXPECT_EQ(g.size(), 1u);
  EXPECT_TRUE(g.erase(spo("a", "p", "b")));
  EXPECT_FALSE(g.erase(spo("a", "p", "b")));
  EXPECT_TRUE(g.empty());
}

TEST(Graph, InsertionOrderIrrelevant) {
  std::mt19937_64 rng(2);
  Graph g = oracle::random_graph(rng, 40);
  std::vector<Triple> triples(g.begin(), g.end());
  for (int round = 0; round < 20; ++round) {
    std::shuffle(triples.begin(), triples.end(), rng);
    Graph h;
    for (const auto& t : triples) h.insert(t);
    EXPECT_EQ(h, g);
  }
}

TEST(Algebra, DiffExamples) {
  Graph g{spo("a", "p", "b"), spo("c", "p", "d")};
  EXPECT_EQ(graph_diff(g, g), Changeset{});
  EXPECT_EQ(graph_diff({}, g), (Changeset{{}, g}));
  Triple t1 = spo("1", "p", "1"), t2 = spo("2", "p", "2"), t3 = spo("3", "p", "3");
  EXPECT_EQ(graph_diff({t1, t2}, {t2, t3}), (Changeset{{t1}, {t3}}));
}

TEST(Algebra, ApplyExamples) {
  Graph g{spo("a", "p", "b")};
  EXPECT_EQ(apply_changeset(g, {}), g);
  Triple t = spo("t", "p", "t");
  EXPECT_EQ(apply_changeset({t}, {{t}, {t}}), Graph{t});
  EXPECT_EQ(apply_changeset({}, {{t}, {t}}), Graph{t});
}

TEST(Algebra, DiffThenApplyRestoresTarget) {
  std::mt19937_64 rng(99);
  for (int k = 0; k < 1000; ++k) {
    Graph a = oracle::random_graph(rng, 30);
    Graph b = oracle::random_graph(rng, 30);
    Changeset d = graph_diff(a, b);
    ASSERT_EQ(apply_changeset(a, d), b);
    ASSERT_TRUE(intersect(d.removed, d.added).empty());
  }
}

TEST(Algebra, SetOperations) {
  Triple t1 = spo("1", "p", "1"), t2 = spo("2", "p", "2"), t3 = spo("3", "p", "3");
  Graph a{t1, t2}, b{t2, t3};
  EXPECT_EQ(unite(a, b), (Graph{t1, t2, t3}));
  EXPECT_EQ(subtract(a, b), Graph{t1});
  EXPECT_EQ(intersect(a, b), Graph{t2});
}

TEST(NTriples, SingleLine) {
  auto r = parse_ntriples("<http://s> <http://p> <http://o> .");
  EXPECT_EQ(r.graph, (Graph{Triple(Term::iri("http://s"), Term::iri("http://p"), Term::iri("http://o"))}));
}

TEST(NTriples, EmptyAndComments) {
  EXPECT_TRUE(parse_ntriples("").graph.empty());
  EXPECT_TRUE(parse_ntriples("# comment\n\n   \n").graph.empty());
  EXPECT_EQ(parse_ntriples("<http://s> <http://p> <http://o> . # trailing\n").graph.size(), 1u);
}

TEST(NTriples, DuplicateLinesCollapse) {
  auto r = parse_ntriples("<http://s> <http://p> <http://o> .\n<http://s> <http://p> <http://o> .\n");
  EXPECT_EQ(r.graph.size(), 1u);
  EXPECT_EQ(r.lines, 2u);
}

TEST(NTriples, AddedListing) {
  Graph g = load_graph("running_example/changesets/2015/02/06/17/000001.added.nt");
  EXPECT_EQ(g.size(), 7u);
  EXPECT_TRUE(g.contains(athlete("Rio_Ferdinand")));
}

TEST(NTriples, LiteralForms) {
  auto g = parse_ntriples(
               "<http://s> <http://p> \"plain\" .\n"
               "<http://s> <http://p> \"tagged\"@EN .\n"
               "<http://s> <http://p> \"5\"^^<http://www.w3.org/2001/XMLSchema#integer> .\n"
               "<http://s> <http://p> \"esc \\\"q\\\" \\u00e9\\U0001F600 \\t\" .\n")
               .graph;
  EXPECT_TRUE(g.contains(Triple(Term::iri("http://s"), Term::iri("http://p"), Term::lang_literal("tagged", "en"))));
  EXPECT_TRUE(g.contains(Triple(Term::iri("http://s"), Term::iri("http://p"), integer("5"))));
  EXPECT_TRUE(g.contains(
      Triple(Term::iri("http://s"), Term::iri("http://p"), Term::literal("esc \"q\" \xc3\xa9\xf0\x9f\x98\x80 \t"))));
}

TEST(NTriples, StrictModeReportsPosition) {
  try {
    parse_ntriples("<http://s> <http://p> <http://o> .\n<http://s> <http://p> .\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_GT(e.column(), 1u);
  }
}

TEST(NTriples, LenientModeSkipsAndCounts) {
  auto r = parse_ntriples("<http://s> <http://p> <http://o> .\ngarbage\n\"lit\" <http://p> <http://o> .\n",
                          {.mode = ParseMode::kLenient, .doc_id = {}});
  EXPECT_EQ(r.graph.size(), 1u);
  EXPECT_EQ(r.skipped, 2u);
  EXPECT_EQ(r.errors.size(), 2u);
}

TEST(NTriples, BlankNodesAreDocumentScoped) {
  std::string doc = "_:b <http://p> <http://o> .\n_:b <http://q> <http://o> .\n";
  auto one = parse_ntriples(doc, {.mode = ParseMode::kStrict, .doc_id = "one"}).graph;
  auto two = parse_ntriples(doc, {.mode = ParseMode::kStrict, .doc_id = "two"}).graph;
  ASSERT_EQ(one.size(), 2u);
  EXPECT_EQ(one.begin()->subject, std::next(one.begin())->subject);
  EXPECT_TRUE(intersect(one, two).empty());
  EXPECT_TRUE(one.begin()->subject.nt().find(kSkolemPrefix) != std::string::npos);
  EXPECT_EQ(parse_ntriples(serialize_ntriples(one)).graph, one);
}

TEST(NTriples, CanonicalSerialization) {
  EXPECT_EQ(serialize_ntriples({}), "");
  EXPECT_EQ(serialize_ntriples({Triple(Term::iri("http://s"), Term::iri("http://p"), Term::iri("http://o"))}),
            "<http://s> <http://p> <http://o> .\n");
  std::mt19937_64 rng(4);
  Graph g = oracle::random_graph(rng, 50);
  std::string text = serialize_ntriples(g);
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  EXPECT_TRUE(std::is_sorted(lines.begin(), lines.end()));
  EXPECT_EQ(parse_ntriples(text).graph, g);
}

TEST(NTriples, CorpusRoundTrip) {
  for (const char* rel : {"running_example/target_t0.nt", "running_example/expected_target.nt",
                          "running_example/expected_pi.nt", "running_example/changesets/2015/02/06/17/000001.added.nt",
                          "running_example/changesets/2015/02/06/17/000001.removed.nt"}) {
    Graph g = load_graph(rel);
    EXPECT_EQ(parse_ntriples(serialize_ntriples(g)).graph, g) << rel;
  }
}

TEST(NTriples, StreamParserMatchesStringParser) {
  std::string text = read_fixture("running_example/changesets/2015/02/06/17/000001.added.nt");
  std::istringstream in(text);
  EXPECT_EQ(parse_ntriples(in).graph, parse_ntriples(text).graph);
}

}  // namespace
}  // namespace irap
