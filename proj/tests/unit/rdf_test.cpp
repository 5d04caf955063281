#include <gtest/gtest.h>

#include <algorithm>

#include "generators.hpp"
#include "oracles.hpp"
#include "wcstore/dht/hash_overlay.hpp"
#include "wcstore/error.hpp"

namespace {

using namespace wcstore;
using net::PeerId;
using rdf::Row;

struct Ring {
  explicit Ring(std::size_t n) {
    for (std::uint64_t p = 1; p <= n; ++p) {
      net.spawn_peer(PeerId{p}, nullptr);
      overlay.join(PeerId{p});
    }
  }
  net::Network net;
  dht::HashOverlay overlay{net, dht::DhtId{2}};
  rdf::DhtTripleStore store{overlay};
};

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return Errc::invalid_argument;
}

const std::vector<rdf::Triple> kTriples{{"a", "type", "Doc"}, {"a", "author", "b"}, {"c", "type", "Doc"}};

TEST(Triples, TextRoundTrip) {
  auto parsed = rdf::parse_triples("a\ttype\tDoc\n\n# note\nc\ttype\tDoc\n");
  ASSERT_EQ(parsed.size(), 2u);
  EXPECT_EQ(parsed[0], (rdf::Triple{"a", "type", "Doc"}));
  EXPECT_EQ(rdf::triple_from_text(rdf::to_text(parsed[1])), parsed[1]);
  EXPECT_EQ(code_of([] { rdf::parse_triples("a\ttype\n"); }), Errc::syntax_error);
  EXPECT_EQ(code_of([] { rdf::parse_triples("a\t\tDoc\n"); }), Errc::syntax_error);
}

TEST(Query, Parse) {
  auto q = rdf::parse_query("SELECT ?x ?y\n?x type Doc\n?x\tauthor\t?y\n");
  EXPECT_EQ(q.projection, (std::vector<std::string>{"x", "y"}));
  ASSERT_EQ(q.patterns.size(), 2u);
  EXPECT_EQ(q.patterns[0].subject, (rdf::Term{true, "x"}));
  EXPECT_EQ(q.patterns[0].object, (rdf::Term{false, "Doc"}));
  for (const char* bad : {"", "?x type Doc\n", "SELECT\n?x a b\n", "SELECT ?x\n?x a\n", "SELECT ?z\n?x a b\n",
                          "SELECT x\n?x a b\n", "SELECT ?x\n"}) {
    EXPECT_EQ(code_of([&] { rdf::parse_query(bad); }), Errc::syntax_error) << bad;
  }
}

TEST(IndexTriples, ThreePutsPerTriple) {
  Ring r(4);
  EXPECT_EQ(r.store.index_triples({kTriples[0], kTriples[1]}, PeerId{1}), 6u);
  EXPECT_EQ(r.store.catalog().at("p:type"), 1u);
  EXPECT_EQ(r.store.catalog().at("s:a"), 2u);
}

TEST(IndexTriples, DuplicatesAreKept) {
  Ring r(3);
  r.store.index_triples({kTriples[0]}, PeerId{1});
  r.store.index_triples({kTriples[0]}, PeerId{2});
  EXPECT_EQ(r.store.get("s:a", PeerId{3}).size(), 2u);
}

TEST(EvalConjunctive, Examples) {
  Ring r(4);
  r.store.index_triples(kTriples, PeerId{1});
  auto q = rdf::parse_query("SELECT ?x ?y\n?x type Doc\n?x author ?y\n");
  EXPECT_EQ(r.store.eval(q, PeerId{2}), (std::vector<Row>{{"a", "b"}}));
  EXPECT_TRUE(r.store.eval(rdf::parse_query("SELECT ?x\n?x type Missing\n"), PeerId{2}).empty());
  EXPECT_EQ(r.store.eval(rdf::parse_query("SELECT ?x\n?x type Doc\n"), PeerId{3}), (std::vector<Row>{{"a"}, {"c"}}));
}

TEST(EvalConjunctive, AllVariablePatternIsUnseedable) {
  Ring r(2);
  r.store.index_triples(kTriples, PeerId{1});
  EXPECT_EQ(code_of([&] { r.store.eval(rdf::parse_query("SELECT ?x\n?x ?p ?o\n"), PeerId{1}); }),
            Errc::unseedable_pattern);
}

TEST(EvalConjunctive, RepeatedVariableInOnePattern) {
  rdf::LocalTripleStore local;
  local.index_triples({{"a", "knows", "a"}, {"a", "knows", "b"}});
  auto q = rdf::parse_query("SELECT ?x\n?x knows ?x\n");
  EXPECT_EQ(rdf::eval_conjunctive(q, local.lookup()), (std::vector<Row>{{"a"}}));
}

TEST(EvalConjunctive, MatchesNestedLoopOracle) {
  gen::Rng rng(12);
  for (int t = 0; t < 150; ++t) {
    auto triples = gen::random_triples(rng, 40);
    auto q = gen::random_conjunctive(rng, 4);
    Ring r(gen::pick(rng, 1, 8));
    r.store.index_triples(triples, PeerId{1});
    rdf::LocalTripleStore local;
    local.index_triples(triples);
    auto expected = gen::nested_loop(triples, q);
    EXPECT_EQ(r.store.eval(q, PeerId{1}), expected);
    EXPECT_EQ(rdf::eval_conjunctive(q, local.lookup()), expected);
  }
}

TEST(EvalConjunctive, PatternOrderDoesNotMatter) {
  gen::Rng rng(13);
  for (int t = 0; t < 100; ++t) {
    auto triples = gen::random_triples(rng, 30);
    auto q = gen::random_conjunctive(rng, 4);
    rdf::LocalTripleStore local;
    local.index_triples(triples);
    auto base = rdf::eval_conjunctive(q, local.lookup());
    auto shuffled = q;
    std::shuffle(shuffled.patterns.begin(), shuffled.patterns.end(), rng);
    EXPECT_EQ(rdf::eval_conjunctive(shuffled, local.lookup()), base);
  }
}

}  // namespace
