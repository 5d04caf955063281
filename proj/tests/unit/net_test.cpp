#include <gtest/gtest.h>

#include "wcstore/error.hpp"
#include "wcstore/net/network.hpp"

namespace {

using namespace wcstore;
using net::Envelope;
using net::Network;
using net::PeerId;

auto noop = [](const Envelope&) {};

Bytes payload(std::size_t n, std::uint8_t fill = 0xab) { return Bytes(n, fill); }

TEST(Network, SpawnAndRemove) {
  Network net;
  for (std::uint64_t i = 1; i <= 3; ++i) net.spawn_peer(PeerId{i}, noop);
  EXPECT_EQ(net.peers().size(), 3u);
  EXPECT_EQ(net.stats(), net::NetworkStats{});
  try {
    net.spawn_peer(PeerId{1}, noop);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::duplicate_peer);
  }
  net.remove_peer(PeerId{1});
  EXPECT_NO_THROW(net.spawn_peer(PeerId{1}, noop));
}

TEST(Network, SendCountsBytesAtDelivery) {
  Network net;
  net.spawn_peer(PeerId{1}, noop);
  net.spawn_peer(PeerId{2}, noop);
  net.send(PeerId{1}, PeerId{2}, payload(100));
  EXPECT_EQ(net.stats().bytes_sent, 0u);
  auto delta = net.run_until_quiescent();
  EXPECT_EQ(delta.bytes_sent, 100u);
  EXPECT_EQ(delta.messages_sent, 1u);
  EXPECT_EQ(net.stats().bytes_sent, 100u);
}

TEST(Network, SelfMessagesAreFree) {
  Network net;
  int seen = 0;
  net.spawn_peer(PeerId{1}, [&](const Envelope&) { ++seen; });
  net.send(PeerId{1}, PeerId{1}, payload(50));
  auto delta = net.run_until_quiescent();
  EXPECT_EQ(seen, 1);
  EXPECT_EQ(delta.bytes_sent, 0u);
  EXPECT_EQ(delta.messages_sent, 0u);
}

TEST(Network, FifoWithinTick) {
  Network net;
  std::vector<std::uint8_t> order;
  net.spawn_peer(PeerId{1}, noop);
  net.spawn_peer(PeerId{2}, [&](const Envelope& e) { order.push_back(e.payload[0]); });
  net.send(PeerId{1}, PeerId{2}, payload(1, 7));
  net.send(PeerId{1}, PeerId{2}, payload(1, 9));
  net.run_until_quiescent();
  EXPECT_EQ(order, (std::vector<std::uint8_t>{7, 9}));
}

TEST(Network, PingPong) {
  Network net;
  net.spawn_peer(PeerId{1}, noop);
  net.spawn_peer(PeerId{2}, [&](const Envelope& e) { net.send(PeerId{2}, e.from, payload(10)); });
  net.send(PeerId{1}, PeerId{2}, payload(10));
  auto delta = net.run_until_quiescent();
  EXPECT_EQ(delta.messages_sent, 2u);
  EXPECT_EQ(delta.bytes_sent, 20u);
  EXPECT_EQ(net.now(), 2u);
}

TEST(Network, ChainOfForwards) {
  // hand count: 5 hops of an 8-byte payload, each charged once
  Network net;
  const std::uint64_t hops = 5;
  for (std::uint64_t i = 0; i <= hops; ++i)
    net.spawn_peer(PeerId{i}, [&net, i](const Envelope& e) {
      if (i < hops) net.send(PeerId{i}, PeerId{i + 1}, e.payload);
    });
  net.send(PeerId{0}, PeerId{1}, payload(8));
  auto delta = net.run_until_quiescent();
  EXPECT_EQ(delta.bytes_sent, hops * 8);
  EXPECT_EQ(delta.messages_sent, hops);
  EXPECT_EQ(delta.per_edge.size(), hops);
}

TEST(Network, EmptyQueueReturnsZero) {
  Network net;
  auto delta = net.run_until_quiescent();
  EXPECT_EQ(delta, net::NetworkStats{});
  EXPECT_EQ(net.now(), 0u);
}

TEST(Network, TickBudgetKeepsEnvelopes) {
  Network net;
  // endless ping-pong
  net.spawn_peer(PeerId{1}, [&](const Envelope& e) { net.send(PeerId{1}, e.from, e.payload); });
  net.spawn_peer(PeerId{2}, [&](const Envelope& e) { net.send(PeerId{2}, e.from, e.payload); });
  net.send(PeerId{1}, PeerId{2}, payload(4));
  try {
    net.run_until_quiescent(10);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::tick_budget_exceeded);
  }
  // conservation: one envelope delivered per tick, one still queued
  EXPECT_EQ(net.delivered(), 10u);
  EXPECT_EQ(net.pending(), 1u);
}

TEST(Network, UnknownPeer) {
  Network net;
  net.spawn_peer(PeerId{1}, noop);
  try {
    net.send(PeerId{1}, PeerId{5}, payload(1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::unknown_peer);
  }
}

TEST(Network, ChannelHandlerOverridesBehavior) {
  Network net;
  int plain = 0, bound = 0;
  net.spawn_peer(PeerId{1}, noop);
  net.spawn_peer(PeerId{2}, [&](const Envelope&) { ++plain; });
  net.bind(PeerId{2}, 9, [&](const Envelope&) { ++bound; });
  net.send(PeerId{1}, PeerId{2}, payload(1), 9);
  net.send(PeerId{1}, PeerId{2}, payload(1), 3);
  net.run_until_quiescent();
  EXPECT_EQ(bound, 1);
  EXPECT_EQ(plain, 1);
}

TEST(Network, HeaderOverhead) {
  Network net(net::NetworkConfig{16});
  net.spawn_peer(PeerId{1}, noop);
  net.spawn_peer(PeerId{2}, noop);
  net.send(PeerId{1}, PeerId{2}, payload(4));
  EXPECT_EQ(net.run_until_quiescent().bytes_sent, 20u);
}

TEST(NetworkStats, ReportAndTotals) {
  Network net;
  for (std::uint64_t i = 1; i <= 3; ++i) net.spawn_peer(PeerId{i}, noop);
  net.send(PeerId{1}, PeerId{2}, payload(3));
  net.send(PeerId{3}, PeerId{1}, payload(5));
  net.send(PeerId{1}, PeerId{2}, payload(2));
  auto s = net.run_until_quiescent();
  EXPECT_EQ(s.report(), "1 2 2 5\n3 1 1 5\ntotal 3 10\n");
  std::uint64_t m = 0, b = 0;
  for (const auto& [edge, e] : s.per_edge) m += e.messages, b += e.bytes;
  EXPECT_EQ(m, s.messages_sent);
  EXPECT_EQ(b, s.bytes_sent);
}

net::NetworkStats scripted_run(std::uint64_t seed) {
  Network net;
  std::uint64_t state = seed;
  auto next = [&] { return state = state * 6364136223846793005ULL + 1442695040888963407ULL; };
  for (std::uint64_t i = 0; i < 6; ++i)
    net.spawn_peer(PeerId{i}, [&, i](const Envelope& e) {
      if (e.payload.size() > 1) net.send(PeerId{i}, PeerId{next() % 6}, Bytes(e.payload.begin() + 1, e.payload.end()));
    });
  for (int k = 0; k < 20; ++k) net.send(PeerId{next() % 6}, PeerId{next() % 6}, payload(next() % 12 + 1));
  net.run_until_quiescent();
  return net.stats();
}

TEST(Network, Deterministic) {
  EXPECT_EQ(scripted_run(42).report(), scripted_run(42).report());
  EXPECT_EQ(scripted_run(42), scripted_run(42));
}

}  // namespace
