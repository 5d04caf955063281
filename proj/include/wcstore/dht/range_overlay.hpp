#pragma once

#include "wcstore/dht/overlay.hpp"

namespace wcstore::dht {

/// Order-preserving overlay: members partition the position domain into
/// disjoint half-open ranges, so keys adjacent in key order live on the same
/// or neighboring peers. Supports interval scans.
///
/// Key positions: numeric mode uses the decimal value; text mode uses the
/// first 7 key bytes big-endian, which is monotone in byte-wise key order.
class RangeOverlay final : public Overlay {
 public:
  RangeOverlay(net::Network& net, DhtId id, OverlayOptions options = {});

  OverlayKind kind() const override { return OverlayKind::range; }

  /// The first member takes the whole domain; later joiners receive the upper
  /// half of the widest range (lowest range on ties).
  void join(PeerId peer) override;
  /// The smaller neighboring range absorbs the leaver's range and keys
  /// (the lower neighbor on ties).
  void leave(PeerId peer) override;

  /// Contacts exactly the members whose ranges intersect [lo, hi); see
  /// last_op().peers_contacted.
  std::vector<KeyValue> get_range(PeerId via, std::string_view lo, std::string_view hi) override;

  std::vector<PeerId> members() const override;
  bool is_member(PeerId peer) const override { return peers_.contains(peer); }
  PeerId owner_of(std::string_view key) const override;
  std::uint64_t position_of(std::string_view key) const override;

  struct Range {
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;

    bool operator==(const Range&) const = default;
  };
  Range range_of(PeerId peer) const;
  /// Members whose ranges intersect the positions keys in [lo, hi) can take.
  std::vector<PeerId> peers_intersecting(std::string_view lo, std::string_view hi) const;
  /// Orders keys as the overlay does: by position, then bytes.
  bool key_less(std::string_view a, std::string_view b) const;

  std::string dump() const override;
  void check_invariants() const override;
  std::vector<KeyValue> contents() const override;

 protected:
  PeerId next_hop(PeerId at, std::string_view key) const override;
  Store& store_of(PeerId peer) override { return peers_.at(peer).store; }
  void handle_extra(const net::Envelope& env, Op op, ByteReader& in) override;

 private:
  struct RangePeer {
    Range range;
    Store store;
  };

  PeerId owner_of_position(std::uint64_t position) const;
  PeerId step_toward(PeerId at, std::uint64_t position) const;
  /// Exclusive upper bound on positions of keys strictly below `hi`.
  std::uint64_t position_bound(std::string_view hi) const;
  bool exact_positions(std::string_view key) const;

  std::map<PeerId, RangePeer> peers_;
  std::map<std::uint64_t, PeerId> by_lo_;
};

}  // namespace wcstore::dht
