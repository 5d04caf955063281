#include <gtest/gtest.h>

#include <algorithm>
#include <limits>

#include "cluster.hpp"
#include "generators.hpp"
#include "wcstore/error.hpp"

namespace {

using namespace wcstore;
using index::Posting;
using index::PostingList;
using net::PeerId;

const char* kD1 = "<doc><sec><title>dht</title><par>xml</par></sec></doc>";

TEST(Postings, RoundTrip) {
  PostingList list{{1, 2, 9, 2}, {7, 3, 5, 3}, {std::uint64_t(1) << 40, 1, 1, 1}};
  auto bytes = index::encode_postings(list);
  EXPECT_EQ(bytes.size(), 3 * index::kPostingBytes);
  EXPECT_EQ(index::decode_postings(bytes), list);
  bytes.pop_back();
  EXPECT_THROW(index::decode_postings(bytes), Error);
}

TEST(Postings, NormalizeSortsAndDedups) {
  PostingList list{{2, 1, 4, 1}, {1, 6, 8, 3}, {1, 2, 9, 2}, {1, 6, 8, 3}};
  index::normalize(list);
  EXPECT_EQ(list, (PostingList{{1, 2, 9, 2}, {1, 6, 8, 3}, {2, 1, 4, 1}}));
}

TEST(Keys, Shapes) {
  EXPECT_EQ(index::tag_key("par"), "t:par");
  EXPECT_EQ(index::word_key("xml"), "w:xml");
  EXPECT_EQ(index::value_key("year", 2003), "v:year=P0000000000000002003");
  EXPECT_EQ(index::value_key_after("year", std::numeric_limits<std::int64_t>::max()), "v:year=Q");
}

TEST(Keys, IntegerEncodingPreservesOrder) {
  gen::Rng rng(11);
  std::vector<std::int64_t> vals{std::numeric_limits<std::int64_t>::min(), -1, 0, 1,
                                 std::numeric_limits<std::int64_t>::max()};
  for (int i = 0; i < 200; ++i) vals.push_back(static_cast<std::int64_t>(rng()));
  for (auto a : vals)
    for (auto b : {vals[0], vals[2], vals[4], vals[7]}) {
      EXPECT_EQ(a < b, index::encode_int(a) < index::encode_int(b)) << a << " " << b;
    }
}

TEST(IndexDocument, D1PublishesSixHashPostings) {
  gen::Cluster c(4);
  auto doc = xml::parse_document(kD1, 1);
  EXPECT_EQ(c.idx.index_document(doc, PeerId{1}), 6u);
  std::map<std::string, std::uint64_t> expected{{"t:doc", 1}, {"t:sec", 1}, {"t:title", 1},
                                                {"t:par", 1}, {"w:dht", 1}, {"w:xml", 1}};
  EXPECT_EQ(c.idx.catalog(), expected);
  EXPECT_EQ(c.idx.version(), 1u);
}

TEST(IndexDocument, IntegerContentGoesToRangeOverlay) {
  gen::Cluster c(3);
  auto doc = xml::parse_document("<y><year>2003</year></y>", 1);
  c.idx.index_document(doc, PeerId{2});
  EXPECT_EQ(c.idx.catalog().at("v:year=P0000000000000002003"), 1u);
  auto held = c.range.get(PeerId{1}, "v:year=P0000000000000002003");
  ASSERT_EQ(held.size(), 1u);
  EXPECT_EQ(index::decode_posting(held[0]), (Posting{1, 2, 4, 2}));
}

TEST(IndexDocument, EmptyElementsHaveNoWords) {
  gen::Cluster c(2);
  c.idx.index_document(xml::parse_document("<a><b/><c/></a>", 1), PeerId{1});
  for (const auto& [key, n] : c.idx.catalog()) EXPECT_EQ(key.rfind("t:", 0), 0u) << key;
}

TEST(IndexDocument, AttributeValuesAreIndexedOnTheAttribute) {
  gen::Cluster c(2);
  EXPECT_EQ(c.idx.index_document(xml::parse_document("<a k=\"x\"><b n=\"7\"/></a>", 1), PeerId{1}), 7u);  // t:a t:@k w:x t:b t:@n w:7 v:@n=7
  EXPECT_EQ(c.idx.lookup_word("x", PeerId{2}), (PostingList{{1, 2, 2, 2}}));
  EXPECT_EQ(c.idx.lookup_value_range("@n", 0, 10, PeerId{2}), (PostingList{{1, 4, 4, 3}}));
}

TEST(Lookup, TagExamples) {
  gen::Cluster c(4);
  c.idx.index_document(xml::parse_document(kD1, 1), PeerId{1});
  EXPECT_EQ(c.idx.lookup_tag("par", PeerId{3}), (PostingList{{1, 6, 8, 3}}));
  EXPECT_TRUE(c.idx.lookup_tag("absent", PeerId{3}).empty());
  c.idx.index_document(xml::parse_document(kD1, 2), PeerId{2});
  EXPECT_EQ(c.idx.lookup_tag("par", PeerId{4}), (PostingList{{1, 6, 8, 3}, {2, 6, 8, 3}}));
  EXPECT_EQ(c.idx.lookup_word("dht", PeerId{4}), (PostingList{{1, 3, 5, 3}, {2, 3, 5, 3}}));
}

TEST(Lookup, ValueRangeExamples) {
  gen::Cluster c(4);
  std::uint64_t id = 1;
  for (int year : {1999, 2003, 2007}) {
    auto text = "<p><year>" + std::to_string(year) + "</year></p>";
    c.idx.index_document(xml::parse_document(text, id++), PeerId{1});
  }
  EXPECT_EQ(c.idx.lookup_value_range("year", 2000, 2005, PeerId{2}), (PostingList{{2, 2, 4, 2}}));
  EXPECT_EQ(c.idx.lookup_value_range("year", 2003, 2003, PeerId{2}), (PostingList{{2, 2, 4, 2}}));
  EXPECT_TRUE(c.idx.lookup_value_range("year", 3000, 4000, PeerId{2}).empty());
  EXPECT_EQ(c.idx.lookup_value_range("year", 1999, 2007, PeerId{2}).size(), 3u);
  EXPECT_EQ(index::value_range_count(c.idx.catalog(), "year", 2000, 2010), 2u);
}

TEST(Lookup, NegativeValues) {
  gen::Cluster c(2);
  c.idx.index_document(xml::parse_document("<r><v>-5</v><v>3</v><v>-20</v></r>", 1), PeerId{1});
  auto got = c.idx.lookup_value_range("v", -10, 10, PeerId{2});
  EXPECT_EQ(got.size(), 2u);
}

TEST(Lookup, RangeWithoutRangeOverlay) {
  net::Network net;
  net.spawn_peer(PeerId{1}, nullptr);
  dht::HashOverlay hash(net, dht::DhtId{0});
  hash.join(PeerId{1});
  index::Index idx(hash, nullptr);
  idx.index_document(xml::parse_document("<y><year>2003</year></y>", 1), PeerId{1});
  try {
    idx.lookup_value_range("year", 0, 3000, PeerId{1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::not_range_capable);
  }
}

// Shadow index built by walking the parsed documents directly.
TEST(Lookup, MatchesShadowIndex) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    gen::Rng rng(seed);
    gen::Cluster c(1 + seed * 2);
    auto docs = gen::random_corpus(rng, 10);
    std::map<std::string, PostingList> tags, words;
    for (const auto& d : docs) {
      c.idx.index_document(d, PeerId{1 + d.doc_id() % (seed * 2)});
      for (const auto& n : d.nodes()) {
        if (n.kind != xml::NodeKind::text) tags[n.name].push_back(n.label);
      }
      for (const auto& n : d.nodes()) {
        if (n.kind == xml::NodeKind::element) continue;
        auto owner = n.kind == xml::NodeKind::text ? d.node(*n.parent).label : n.label;
        auto ws = xml::words_of(n.value);
        std::sort(ws.begin(), ws.end());
        ws.erase(std::unique(ws.begin(), ws.end()), ws.end());
        for (const auto& w : ws) words[w].push_back(owner);
      }
    }
    for (auto& [t, l] : tags) {
      index::normalize(l);
      EXPECT_EQ(c.idx.lookup_tag(t, PeerId{1}), l) << t;
    }
    for (auto& [w, l] : words) {
      index::normalize(l);
      EXPECT_EQ(c.idx.lookup_word(w, PeerId{1}), l) << w;
    }
  }
}

}  // namespace
