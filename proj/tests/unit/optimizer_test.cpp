#include <gtest/gtest.h>

#include "generators.hpp"
#include "pipeline.hpp"
#include "wcstore/tpq/naive.hpp"

namespace {

using namespace wcstore;
using namespace wcstore::optimizer;
using net::PeerId;

const char* kD1 = "<doc><sec><title>dht</title><par>xml</par></sec></doc>";

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return Errc::invalid_argument;
}

std::size_t count_ships(const Plan& plan) {
  std::size_t n = 0;
  for (const auto* op : preorder(*plan.root)) n += op->kind == OpKind::ship;
  return n;
}

/// Two tags whose keys live on different peers of `c`.
std::pair<std::string, std::string> split_tags(gen::Cluster& c) {
  std::vector<std::string> tags{"a", "b", "c", "d", "e", "f", "g", "h"};
  for (const auto& t : tags)
    for (const auto& u : tags)
      if (c.hash.owner_of(index::tag_key(t)) != c.hash.owner_of(index::tag_key(u))) return {t, u};
  throw std::logic_error("no split");
}

/// `big` elements under the root, the first `small` of which hold a child.
std::string skew_doc(const std::string& upper, const std::string& lower, int big, int small) {
  std::string s = "<r>";
  for (int i = 0; i < big; ++i) s += i < small ? "<" + upper + "><" + lower + "/></" + upper + ">" : "<" + upper + "/>";
  return s + "</r>";
}

TEST(Decompose, RangeAndHashSplit) {
  auto p = tpq::parse_pattern("//paper[/year in 2000..2005][/title=\"xml\"]!");
  auto d = decompose(p);
  ASSERT_EQ(d.subqueries.size(), 2u);
  EXPECT_EQ(d.subqueries[0].overlay, dht::OverlayKind::hash);
  EXPECT_EQ(d.subqueries[0].nodes, (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(d.subqueries[1].overlay, dht::OverlayKind::range);
  EXPECT_EQ(d.subqueries[1].nodes, (std::vector<std::size_t>{1}));
  ASSERT_EQ(d.recomposition.size(), 1u);
  EXPECT_EQ(d.recomposition[0].parent, 0u);
  EXPECT_EQ(d.recomposition[0].child, 1u);
  EXPECT_EQ(d.recomposition[0].axis, tpq::Axis::child);
  EXPECT_EQ(d.return_nodes, (std::vector<std::size_t>{0}));
}

TEST(Decompose, NoRangeIsOneSubquery) {
  auto d = decompose(tpq::parse_pattern("//sec[/title]!"));
  ASSERT_EQ(d.subqueries.size(), 1u);
  EXPECT_EQ(d.subqueries[0].nodes, (std::vector<std::size_t>{0, 1}));
  EXPECT_TRUE(d.recomposition.empty());
}

TEST(Decompose, RangeInTheMiddleSplitsComponents) {
  auto d = decompose(tpq::parse_pattern("//a[/b in 1..3[/c]]"));
  ASSERT_EQ(d.subqueries.size(), 3u);
  EXPECT_EQ(d.recomposition.size(), 2u);
}

TEST(PlanDocument, Golden) {
  gen::Cluster c(4);
  c.idx.index_document(xml::parse_document(kD1, 1), PeerId{1});
  auto plan = gen::naive_plan(c, tpq::parse_pattern("//sec[/title]!"), PeerId{1});
  const char* golden =
      "<Plan pattern=\"//sec[/title]!\"><Recompose site=\"1\" nodes=\"0\" rows=\"0:1,1:1\" est=\"0\">"
      "<StructJoin site=\"1\" nodes=\"0,1\" parent=\"0\" child=\"1\" axis=\"child\" rows=\"0:1,1:1\" est=\"72\">"
      "<Ship site=\"1\" nodes=\"0\" rows=\"0:1\" est=\"32\"><At site=\"2\" nodes=\"0\" rows=\"0:1\" est=\"32\">"
      "<IndexLookup site=\"2\" dht=\"0\" key=\"t:sec\" nodes=\"0\" rows=\"0:1\" est=\"32\"/></At></Ship>"
      "<Ship site=\"1\" nodes=\"1\" rows=\"1:1\" est=\"32\"><At site=\"3\" nodes=\"1\" rows=\"1:1\" est=\"32\">"
      "<IndexLookup site=\"3\" dht=\"0\" key=\"t:title\" nodes=\"1\" rows=\"1:1\" est=\"32\"/></At></Ship>"
      "</StructJoin></Recompose></Plan>";
  EXPECT_EQ(to_document(plan), golden);
  EXPECT_EQ(cost(plan), 64u);
  EXPECT_EQ(to_document(from_document(golden)), golden);
}

TEST(PlanDocument, RoundTripRandomPlans) {
  gen::Rng rng(4);
  gen::Cluster c(5);
  for (const auto& d : gen::random_corpus(rng, 10)) c.idx.index_document(d, PeerId{1});
  for (int i = 0; i < 100; ++i) {
    auto p = gen::random_pattern(rng);
    for (const auto& plan : {gen::naive_plan(c, p, PeerId{2}), gen::optimized_plan(c, p, PeerId{2})}) {
      auto text = to_document(plan);
      auto back = from_document(text);
      EXPECT_EQ(to_document(back), text);
      EXPECT_EQ(back.pattern, plan.pattern);
      check_well_formed(back);
    }
  }
}

TEST(PlanDocument, Malformed) {
  auto bad = [](std::string_view text) { return code_of([&] { from_document(text); }); };
  EXPECT_EQ(bad("not xml"), Errc::malformed_plan);
  EXPECT_EQ(bad("<Plan pattern=\"//a!\"/>"), Errc::malformed_plan);
  EXPECT_EQ(bad("<Plan pattern=\"//a!\"><Frobnicate site=\"1\" nodes=\"0\" rows=\"0:0\" est=\"0\"/></Plan>"),
            Errc::malformed_plan);
  // join over a pair that is not a pattern edge
  EXPECT_EQ(bad("<Plan pattern=\"//a[/b]!\"><StructJoin site=\"1\" nodes=\"0,1\" parent=\"1\" child=\"0\" axis=\"child\" "
                "rows=\"0:0,1:0\" est=\"0\"><IndexLookup site=\"1\" dht=\"0\" key=\"t:a\" nodes=\"0\" rows=\"0:0\" "
                "est=\"0\"/><IndexLookup site=\"1\" dht=\"0\" key=\"t:b\" nodes=\"1\" rows=\"1:0\" est=\"0\"/>"
                "</StructJoin></Plan>"),
            Errc::malformed_plan);
  // input on another peer without a Ship
  EXPECT_EQ(bad("<Plan pattern=\"//a!\"><Recompose site=\"1\" nodes=\"0\" rows=\"0:0\" est=\"0\"><IndexLookup "
                "site=\"2\" dht=\"0\" key=\"t:a\" nodes=\"0\" rows=\"0:0\" est=\"0\"/></Recompose></Plan>"),
            Errc::malformed_plan);
}

TEST(ShipEncoding, Layouts) {
  tpq::NodeLists one{{3, {{1, 2, 9, 2}}}};
  EXPECT_EQ(encode_output(one, {3}, true).size(), 32u);
  EXPECT_EQ(decode_output(encode_output(one, {3}, true), {3}, true), one);
  tpq::NodeLists two{{0, {{1, 2, 9, 2}, {1, 6, 8, 3}}}, {1, {}}};
  auto bytes = encode_output(two, {0, 1}, false);
  EXPECT_EQ(bytes.size(), 4u + 64u + 4u);
  EXPECT_EQ(decode_output(bytes, {0, 1}, false), two);
  tpq::NodeLists none{{0, {}}, {1, {}}};
  EXPECT_TRUE(encode_output(none, {0, 1}, false).empty());
  EXPECT_EQ(decode_output({}, {0, 1}, false), none);
}

TEST(Rewrite, EmptyRuleListIsIdentity) {
  gen::Cluster c(4);
  c.idx.index_document(xml::parse_document(kD1, 1), PeerId{1});
  auto plan = gen::naive_plan(c, tpq::parse_pattern("//sec[/title=\"dht\"][/par]!"), PeerId{1});
  EXPECT_EQ(to_document(rewrite(plan, {}, 16)), to_document(plan));
}

// Join-rooted sub-plan: 1000 upper postings on one peer, 10 lower on the query peer.
TEST(Rewrite, JoinSitePushMovesTheSmallSide) {
  gen::Cluster c(4);
  auto [big, small] = split_tags(c);
  auto a = c.hash.owner_of(index::tag_key(big));
  auto q = c.hash.owner_of(index::tag_key(small));
  c.idx.index_document(xml::parse_document(skew_doc(big, small, 1000, 10), 1), PeerId{1});
  auto p = tpq::parse_pattern("//" + big + "/" + small + "!");
  auto full = gen::naive_plan(c, p, q);
  Plan sub;
  sub.pattern = full.pattern;
  sub.root = full.root->children[0]->clone();
  EXPECT_EQ(cost(sub), 32000u);
  auto pushed = rewrite(sub, {join_site_push()}, 16);
  EXPECT_EQ(cost(pushed), 320u);
  EXPECT_EQ(pushed.root->site, a);

  PlanExecutor exec(c.net, c.idx);
  auto naive_run = exec.execute(sub, q);
  auto pushed_run = exec.execute(pushed, q);
  EXPECT_EQ(naive_run.stats.bytes_sent, 32000u);
  EXPECT_EQ(pushed_run.stats.bytes_sent, 320u);
  EXPECT_EQ(naive_run.lists, pushed_run.lists);
}

TEST(Rewrite, Fixpoint) {
  gen::Rng rng(9);
  gen::Cluster c(6);
  for (const auto& d : gen::random_corpus(rng, 15)) c.idx.index_document(d, PeerId{1 + d.doc_id() % 6});
  for (int i = 0; i < 60; ++i) {
    auto p = gen::random_pattern(rng);
    auto once = rewrite(gen::naive_plan(c, p, PeerId{1}), default_rules(), 64);
    auto twice = rewrite(once, default_rules(), 64);
    EXPECT_EQ(to_document(twice), to_document(once));
    EXPECT_LE(cost(once), cost(gen::naive_plan(c, p, PeerId{1})));
  }
}

TEST(Rewrite, LookupFusion) {
  gen::Cluster c(3);
  c.idx.index_document(xml::parse_document("<r><a><a/></a></r>", 1), PeerId{1});
  auto p = tpq::parse_pattern("//a//a!");
  auto naive = gen::naive_plan(c, p, PeerId{1});
  auto fused = rewrite(naive, {lookup_fusion()}, 16);
  EXPECT_LT(fused.size(), naive.size());
  EXPECT_LE(cost(fused), cost(naive));
  check_well_formed(fused);
  PlanExecutor exec(c.net, c.idx);
  EXPECT_EQ(exec.execute(fused, PeerId{1}).bindings, exec.execute(naive, PeerId{1}).bindings);
}

TEST(Place, SkewJoinsAtTheLargeSide) {
  gen::Cluster c(4);
  auto [big, small] = split_tags(c);
  auto a = c.hash.owner_of(index::tag_key(big));
  PeerId q{1};
  for (std::uint64_t p = 1; p <= 4; ++p)
    if (PeerId{p} != a && PeerId{p} != c.hash.owner_of(index::tag_key(small))) q = PeerId{p};
  auto docs = std::vector{xml::parse_document(skew_doc(big, small, 1000, 10), 1)};
  c.idx.index_document(docs[0], PeerId{1});
  auto p = tpq::parse_pattern("//" + big + "/" + small + "!");
  auto naive = gen::naive_plan(c, p, q);
  auto placed = gen::optimized_plan(c, p, q);
  const PlanNode* join = nullptr;
  for (const auto* op : preorder(*placed.root))
    if (op->kind == OpKind::struct_join) join = op;
  ASSERT_NE(join, nullptr);
  EXPECT_EQ(join->site, a);
  EXPECT_LT(cost(placed), cost(naive));

  gen::DocHost host(docs, 4);
  PlanExecutor exec(c.net, c.idx, &host);
  auto n = exec.execute(naive, q);
  auto o = exec.execute(placed, q);
  EXPECT_EQ(n.bindings, o.bindings);
  EXPECT_EQ(n.resources, o.resources);
  EXPECT_EQ(o.resources.size(), 10u);
  EXPECT_LT(o.stats.bytes_sent * 5, n.stats.bytes_sent);
}

TEST(Place, AllLeavesAtQueryPeerNeedNoShips) {
  gen::Cluster c(1);
  c.idx.index_document(xml::parse_document(kD1, 1), PeerId{1});
  auto placed = gen::optimized_plan(c, tpq::parse_pattern("//sec[/title=\"dht\"]//par!"), PeerId{1});
  EXPECT_EQ(count_ships(placed), 0u);
  EXPECT_EQ(cost(placed), 0u);
}

TEST(Place, EqualInputsTieToQueryPeer) {
  gen::Cluster c(4);
  c.idx.index_document(xml::parse_document(kD1, 1), PeerId{1});
  auto placed = gen::optimized_plan(c, tpq::parse_pattern("//sec[/title]!"), PeerId{1});
  EXPECT_NE(c.hash.owner_of("t:sec"), c.hash.owner_of("t:title"));
  for (const auto* op : preorder(*placed.root))
    if (op->kind == OpKind::struct_join) EXPECT_EQ(op->site, PeerId{1});
}

TEST(Execute, SecOnD1ReturnsSerializedResource) {
  gen::Cluster c(4);
  std::vector docs{xml::parse_document(kD1, 1)};
  c.idx.index_document(docs[0], PeerId{2});
  gen::DocHost host(docs, 4);
  PlanExecutor exec(c.net, c.idx, &host);
  auto plan = gen::optimized_plan(c, tpq::parse_pattern("//sec!"), PeerId{1});
  auto first = exec.execute(plan, PeerId{1});
  ASSERT_EQ(first.resources.size(), 1u);
  EXPECT_EQ(first.resources[0].resource_id, "1#2");
  EXPECT_EQ(first.resources[0].payload, "<sec><title>dht</title><par>xml</par></sec>");
  auto second = exec.execute(plan, PeerId{1});
  EXPECT_EQ(second.resources, first.resources);
  EXPECT_EQ(second.stats.bytes_sent, first.stats.bytes_sent);
}

TEST(Execute, UnreachableSite) {
  gen::Cluster c(3);
  c.idx.index_document(xml::parse_document(kD1, 1), PeerId{2});
  auto plan = gen::optimized_plan(c, tpq::parse_pattern("//sec[/title]!"), PeerId{1});
  PlanExecutor exec(c.net, c.idx);
  EXPECT_EQ(code_of([&] { exec.execute(plan, PeerId{3}); }), Errc::malformed_plan);
  c.net.remove_peer(preorder(*plan.root).back()->site);
  EXPECT_EQ(code_of([&] { exec.execute(plan, PeerId{1}); }), Errc::plan_site_unreachable);
}

TEST(Pipeline, SemanticsCostAndMonotonicity) {
  gen::Rng rng(31);
  for (int t = 0; t < 40; ++t) {
    auto peers = gen::pick(rng, 1, 8);
    gen::Cluster c(peers);
    auto docs = gen::random_corpus(rng, 20);
    for (const auto& d : docs) c.idx.index_document(d, PeerId{1 + d.doc_id() % peers});
    PeerId q{gen::pick(rng, 1, peers)};
    for (int i = 0; i < 3; ++i) {
      auto p = gen::random_pattern(rng);
      auto naive = gen::naive_plan(c, p, q);
      auto placed = gen::optimized_plan(c, p, q);
      check_well_formed(placed);
      PlanExecutor exec(c.net, c.idx);
      auto n = exec.execute(naive, q);
      auto o = exec.execute(placed, q);
      auto expected = tpq::eval_naive(p, docs);
      EXPECT_EQ(n.bindings, expected) << tpq::to_string(p);
      EXPECT_EQ(o.bindings, expected) << tpq::to_string(p);
      EXPECT_LE(o.stats.bytes_sent, n.stats.bytes_sent) << tpq::to_string(p);
      EXPECT_LE(o.stats.bytes_sent, cost(placed));
      bool hash_only = decompose(p).subqueries.size() == 1 && decompose(p).subqueries[0].overlay == dht::OverlayKind::hash;
      if (hash_only) EXPECT_EQ(n.stats.bytes_sent, cost(naive)) << tpq::to_string(p);
    }
  }
}

}  // namespace
