#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "wcstore/net/network.hpp"
#include "wcstore/util/bytes.hpp"

namespace wcstore::dht {

using net::PeerId;

/// Names one overlay instance; a peer may be an endpoint of several.
struct DhtId {
  std::uint32_t value = 0;

  auto operator<=>(const DhtId&) const = default;
};

enum class OverlayKind { hash, range };

std::string_view to_string(OverlayKind kind);

enum class KeyMode {
  text,     ///< positions derived from the key bytes (hash or order-preserving prefix)
  numeric,  ///< decimal key text is its own position; peer ids are ring positions
};

using Value = Bytes;

struct KeyValue {
  std::string key;
  Value value;

  bool operator==(const KeyValue&) const = default;
};

struct OverlayOptions {
  KeyMode key_mode = KeyMode::text;
  /// Route directly to the responsible peer instead of hop by hop.
  bool full_table_routing = false;
  /// Salt for ring positions in text mode.
  std::uint64_t seed = 0;
  /// Range overlays: the key-position domain [domain_lo, domain_hi).
  std::uint64_t domain_lo = 0;
  std::uint64_t domain_hi = std::uint64_t{1} << 56;
  std::uint64_t tick_budget = 1'000'000;
};

/// Cost of the most recent operation.
struct OpTrace {
  std::uint64_t hops = 0;             ///< remote forwarding messages
  std::uint64_t peers_contacted = 0;  ///< peers that served part of a range scan
};

/// A (key, value) overlay running over simulated peers. Every routing hop
/// and key transfer is a network message on this overlay's channel.
class Overlay {
 public:
  Overlay(net::Network& net, DhtId id, OverlayOptions options);
  virtual ~Overlay() = default;

  Overlay(const Overlay&) = delete;
  Overlay& operator=(const Overlay&) = delete;

  DhtId id() const { return id_; }
  virtual OverlayKind kind() const = 0;
  const OverlayOptions& options() const { return options_; }
  net::Channel channel() const { return static_cast<net::Channel>(0x100 + id_.value); }

  virtual void join(PeerId peer) = 0;
  virtual void leave(PeerId peer) = 0;
  void put(PeerId via, std::string_view key, Value value);
  std::vector<Value> get(PeerId via, std::string_view key);
  /// Pairs with lo <= key < hi in key order. Hash overlays throw NotRangeCapable.
  virtual std::vector<KeyValue> get_range(PeerId via, std::string_view lo, std::string_view hi);

  virtual std::vector<PeerId> members() const = 0;
  virtual bool is_member(PeerId peer) const = 0;
  bool empty() const { return members().empty(); }
  /// Responsible peer for `key` from the global membership table.
  virtual PeerId owner_of(std::string_view key) const = 0;
  virtual std::uint64_t position_of(std::string_view key) const = 0;

  /// "dht_id peer_id range_or_position key_count" per member.
  virtual std::string dump() const = 0;
  /// Throws std::logic_error naming the first violated structural invariant.
  virtual void check_invariants() const = 0;
  /// Every (key, value) currently held, in no particular order.
  virtual std::vector<KeyValue> contents() const = 0;

  const OpTrace& last_op() const { return trace_; }

 protected:
  enum Op : std::uint8_t { kPut = 1, kGet, kGetReply, kTransfer, kJoin, kRange, kRangeReply };

  using Store = std::map<std::string, std::vector<Value>>;

  /// Next peer a message for `key` travels to from `at`, or `at` if it owns it.
  virtual PeerId next_hop(PeerId at, std::string_view key) const = 0;
  virtual Store& store_of(PeerId peer) = 0;
  virtual void handle_extra(const net::Envelope& env, Op op, ByteReader& in);

  void bind_peer(PeerId peer);
  void unbind_peer(PeerId peer);
  void send(PeerId from, PeerId to, Bytes payload);
  void run();
  void require_member(PeerId peer) const;
  void require_nonempty() const;

  static Bytes encode_entries(const Store& entries);
  static void merge_entries(Store& into, ByteReader& in);

  net::Network& net_;
  DhtId id_;
  OverlayOptions options_;
  OpTrace trace_;
  std::uint64_t next_request_ = 1;
  std::map<std::uint64_t, std::vector<KeyValue>> replies_;

 private:
  void on_message(const net::Envelope& env);
  void route(PeerId at, Bytes payload);
};

}  // namespace wcstore::dht
