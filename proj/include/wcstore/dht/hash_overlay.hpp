#pragma once

#include "wcstore/dht/overlay.hpp"

namespace wcstore::dht {

/// Chord-style ring. A peer owns the keys whose position lies in
/// (predecessor.position, position], wrapping. Messages travel along
/// successor links unless full-table routing is enabled.
class HashOverlay final : public Overlay {
 public:
  HashOverlay(net::Network& net, DhtId id, OverlayOptions options = {});

  OverlayKind kind() const override { return OverlayKind::hash; }

  /// Inserts `peer` at its ring position; its successor hands over the arc
  /// (predecessor, peer] and the keys on it.
  void join(PeerId peer) override;
  /// Hands every key held by `peer` to its successor.
  void leave(PeerId peer) override;

  std::vector<PeerId> members() const override;
  bool is_member(PeerId peer) const override { return ring_.contains(peer); }
  PeerId owner_of(std::string_view key) const override;
  std::uint64_t position_of(std::string_view key) const override;
  std::uint64_t peer_position(PeerId peer) const;

  PeerId successor(PeerId peer) const { return ring_.at(peer).succ; }
  PeerId predecessor(PeerId peer) const { return ring_.at(peer).pred; }
  /// Keys held by `peer` with their value counts.
  std::map<std::string, std::size_t> held_keys(PeerId peer) const;

  std::string dump() const override;
  void check_invariants() const override;
  std::vector<KeyValue> contents() const override;

 protected:
  PeerId next_hop(PeerId at, std::string_view key) const override;
  Store& store_of(PeerId peer) override { return ring_.at(peer).store; }
  void handle_extra(const net::Envelope& env, Op op, ByteReader& in) override;

 private:
  struct RingPeer {
    std::uint64_t position = 0;
    PeerId succ;
    PeerId pred;
    Store store;
  };

  bool owns(PeerId at, std::uint64_t position) const;
  PeerId owner_of_position(std::uint64_t position) const;

  std::map<PeerId, RingPeer> ring_;
  std::map<std::uint64_t, PeerId> by_position_;
};

}  // namespace wcstore::dht
