#pragma once

#include <compare>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "wcstore/util/bytes.hpp"

namespace wcstore::net {

struct PeerId {
  std::uint64_t value = 0;

  auto operator<=>(const PeerId&) const = default;
};

std::string to_string(PeerId id);

/// Demultiplexing tag carried in the envelope header. Header bytes are not
/// part of the payload; they cost `NetworkConfig::header_overhead`.
using Channel = std::uint16_t;

struct Envelope {
  PeerId from;
  PeerId to;
  Channel channel = 0;
  Bytes payload;
  std::size_t size = 0;
  std::uint64_t deliver_at = 0;
};

struct EdgeStats {
  std::uint64_t messages = 0;
  std::uint64_t bytes = 0;

  bool operator==(const EdgeStats&) const = default;
};

struct NetworkStats {
  std::uint64_t messages_sent = 0;
  std::uint64_t bytes_sent = 0;
  std::map<std::pair<PeerId, PeerId>, EdgeStats> per_edge;

  bool operator==(const NetworkStats&) const = default;

  NetworkStats& operator+=(const NetworkStats& other);
  /// Component-wise difference; `earlier` must be a prefix of this history.
  NetworkStats since(const NetworkStats& earlier) const;

  /// One "from to messages bytes" line per edge, then "total <messages> <bytes>".
  std::string report() const;
};

struct NetworkConfig {
  /// Bytes charged per remote message on top of the payload.
  std::uint64_t header_overhead = 0;
};

/// Deterministic discrete-event message passing. Every send is delivered one
/// logical tick later; envelopes due in the same tick are delivered in the
/// order they were enqueued. Self-addressed envelopes are delivered the same
/// way but are not charged as network traffic.
class Network {
 public:
  using Handler = std::function<void(const Envelope&)>;

  explicit Network(NetworkConfig config = {}) : config_(config) {}

  Network(const Network&) = delete;
  Network& operator=(const Network&) = delete;

  void spawn_peer(PeerId id, Handler behavior);
  void remove_peer(PeerId id);
  bool has_peer(PeerId id) const { return peers_.contains(id); }
  std::vector<PeerId> peers() const;

  /// Routes envelopes on `channel` at `peer` to `handler` instead of the
  /// peer's default behavior.
  void bind(PeerId peer, Channel channel, Handler handler);
  void unbind(PeerId peer, Channel channel);

  void send(PeerId from, PeerId to, Bytes payload, Channel channel = 0);

  /// Delivers envelopes tick by tick until none are pending. Returns the
  /// traffic delivered during this call. Throws TickBudgetExceeded if
  /// envelopes remain after `max_ticks` ticks.
  NetworkStats run_until_quiescent(std::uint64_t max_ticks = 1'000'000);

  const NetworkStats& stats() const { return stats_; }
  std::uint64_t now() const { return tick_; }
  std::size_t pending() const { return queue_.size(); }
  std::uint64_t delivered() const { return delivered_; }

 private:
  struct PeerSlot {
    Handler behavior;
    std::map<Channel, Handler> channels;
  };

  void deliver(const Envelope& env);

  NetworkConfig config_;
  std::map<PeerId, PeerSlot> peers_;
  std::deque<Envelope> queue_;
  NetworkStats stats_;
  std::uint64_t tick_ = 0;
  std::uint64_t delivered_ = 0;
};

}  // namespace wcstore::net
