#include "wcstore/dht/range_overlay.hpp"

#include <algorithm>
#include <optional>
#include <charconv>
#include <sstream>
#include <stdexcept>

namespace wcstore::dht {

namespace {
constexpr std::size_t kPrefixBytes = 7;
}

RangeOverlay::RangeOverlay(net::Network& net, DhtId id, OverlayOptions options)
    : Overlay(net, id, options) {
  if (options_.domain_lo >= options_.domain_hi)
    throw Error(Errc::invalid_argument, "empty range-overlay domain");
  if (options_.key_mode == KeyMode::text && options_.domain_hi > (std::uint64_t{1} << 56))
    throw Error(Errc::invalid_argument, "text-mode domain exceeds 56-bit positions");
}

std::uint64_t RangeOverlay::position_of(std::string_view key) const {
  if (key.empty()) throw Error(Errc::invalid_argument, "empty key");
  if (options_.key_mode == KeyMode::numeric) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(key.data(), key.data() + key.size(), v);
    if (ec != std::errc() || p != key.data() + key.size())
      throw Error(Errc::invalid_argument, "numeric key mode needs a decimal key, got '" + std::string(key) + "'");
    if (v < options_.domain_lo || v >= options_.domain_hi)
      throw Error(Errc::invalid_argument, "key " + std::string(key) + " outside the overlay domain");
    return v;
  }
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < kPrefixBytes; ++i)
    v = (v << 8) | (i < key.size() ? static_cast<std::uint8_t>(key[i]) : 0);
  return v;
}

bool RangeOverlay::exact_positions(std::string_view key) const {
  return options_.key_mode == KeyMode::numeric || key.size() <= kPrefixBytes;
}

std::uint64_t RangeOverlay::position_bound(std::string_view hi) const {
  auto p = position_of(hi);
  return exact_positions(hi) ? p : p + 1;
}

bool RangeOverlay::key_less(std::string_view a, std::string_view b) const {
  auto pa = position_of(a), pb = position_of(b);
  if (pa != pb) return pa < pb;
  return a < b;
}

std::vector<PeerId> RangeOverlay::members() const {
  std::vector<PeerId> out;
  for (const auto& [id, p] : peers_) out.push_back(id);
  return out;
}

RangeOverlay::Range RangeOverlay::range_of(PeerId peer) const { return peers_.at(peer).range; }

PeerId RangeOverlay::owner_of_position(std::uint64_t position) const {
  auto it = by_lo_.upper_bound(position);
  return std::prev(it)->second;
}

PeerId RangeOverlay::owner_of(std::string_view key) const {
  require_nonempty();
  return owner_of_position(position_of(key));
}

PeerId RangeOverlay::step_toward(PeerId at, std::uint64_t position) const {
  const auto& r = peers_.at(at).range;
  if (position >= r.lo && position < r.hi) return at;
  if (options_.full_table_routing) return owner_of_position(position);
  auto it = by_lo_.find(r.lo);
  return position < r.lo ? std::prev(it)->second : std::next(it)->second;
}

PeerId RangeOverlay::next_hop(PeerId at, std::string_view key) const {
  return step_toward(at, position_of(key));
}

std::vector<PeerId> RangeOverlay::peers_intersecting(std::string_view lo, std::string_view hi) const {
  std::vector<PeerId> out;
  if (peers_.empty() || !key_less(lo, hi)) return out;
  auto from = position_of(lo);
  auto to = position_bound(hi);
  for (auto it = by_lo_.find(peers_.at(owner_of_position(from)).range.lo); it != by_lo_.end(); ++it) {
    if (it->first >= to) break;
    out.push_back(it->second);
  }
  return out;
}

void RangeOverlay::join(PeerId peer) {
  if (!net_.has_peer(peer)) throw Error(Errc::unknown_peer, "peer " + net::to_string(peer));
  if (peers_.contains(peer))
    throw Error(Errc::already_member, "peer " + net::to_string(peer) + " already in dht " + std::to_string(id_.value));
  trace_ = {};
  if (peers_.empty()) {
    bind_peer(peer);
    peers_[peer] = RangePeer{{options_.domain_lo, options_.domain_hi}, {}};
    by_lo_[options_.domain_lo] = peer;
    return;
  }
  PeerId widest = by_lo_.begin()->second;
  std::uint64_t best = 0;
  for (const auto& [lo, id] : by_lo_) {
    const auto& r = peers_.at(id).range;
    if (r.hi - r.lo > best) {
      best = r.hi - r.lo;
      widest = id;
    }
  }
  if (best < 2) throw Error(Errc::range_exhausted, "no range wide enough to split");
  bind_peer(peer);
  ByteWriter w;
  w.u8(kJoin);
  w.u64(peer.value);
  send(peer, widest, w.take());
  run();
}

void RangeOverlay::leave(PeerId peer) {
  require_member(peer);
  trace_ = {};
  auto node = peers_.at(peer);
  auto it = by_lo_.find(node.range.lo);
  std::optional<PeerId> lower, upper;
  if (it != by_lo_.begin()) lower = std::prev(it)->second;
  if (std::next(it) != by_lo_.end()) upper = std::next(it)->second;
  by_lo_.erase(it);
  peers_.erase(peer);
  if (!lower && !upper) {
    unbind_peer(peer);
    return;
  }
  auto width = [&](PeerId p) { return peers_.at(p).range.hi - peers_.at(p).range.lo; };
  PeerId heir;
  if (lower && upper) heir = width(*upper) < width(*lower) ? *upper : *lower;
  else heir = lower ? *lower : *upper;
  auto& hr = peers_.at(heir).range;
  if (heir == lower) {
    hr.hi = node.range.hi;
  } else {
    by_lo_.erase(hr.lo);
    hr.lo = node.range.lo;
    by_lo_[hr.lo] = heir;
  }
  send(peer, heir, encode_entries(node.store));
  run();
  unbind_peer(peer);
}

std::vector<KeyValue> RangeOverlay::get_range(PeerId via, std::string_view lo, std::string_view hi) {
  require_member(via);
  trace_ = {};
  if (key_less(hi, lo)) throw Error(Errc::invalid_argument, "get_range with lo > hi");
  if (!key_less(lo, hi)) return {};
  auto req = next_request_++;
  ByteWriter w;
  w.u8(kRange);
  w.u64(req);
  w.u64(via.value);
  w.u8(0);  // routing phase
  w.str(lo);
  w.str(hi);
  send(via, via, w.take());
  run();
  auto out = std::move(replies_[req]);
  replies_.erase(req);
  std::stable_sort(out.begin(), out.end(),
                   [this](const KeyValue& a, const KeyValue& b) { return key_less(a.key, b.key); });
  return out;
}

void RangeOverlay::handle_extra(const net::Envelope& env, Op op, ByteReader& in) {
  PeerId at = env.to;
  switch (op) {
    case kJoin: {
      PeerId joiner{in.u64()};
      auto& self = peers_.at(at);
      auto mid = self.range.lo + (self.range.hi - self.range.lo) / 2;
      Range upper{mid, self.range.hi};
      self.range.hi = mid;
      Store moved;
      for (auto it = self.store.begin(); it != self.store.end();) {
        if (position_of(it->first) >= mid) {
          moved.insert(std::move(*it));
          it = self.store.erase(it);
        } else {
          ++it;
        }
      }
      peers_[joiner] = RangePeer{upper, {}};
      by_lo_[mid] = joiner;
      send(at, joiner, encode_entries(moved));
      return;
    }
    case kRange: {
      auto req = in.u64();
      PeerId origin{in.u64()};
      bool scanning = in.u8() != 0;
      auto lo = in.str();
      auto hi = in.str();
      auto from = position_of(lo);
      if (!scanning) {
        auto next = step_toward(at, from);
        if (next != at) {
          send(at, next, env.payload);
          return;
        }
      }
      ++trace_.peers_contacted;
      const auto& self = peers_.at(at);
      ByteWriter reply;
      reply.u8(kRangeReply);
      reply.u64(req);
      std::vector<const Store::value_type*> hits;
      for (const auto& entry : self.store)
        if (!key_less(entry.first, lo) && key_less(entry.first, hi)) hits.push_back(&entry);
      std::uint32_t n = 0;
      for (auto* e : hits) n += static_cast<std::uint32_t>(e->second.size());
      reply.u32(n);
      for (auto* e : hits)
        for (const auto& v : e->second) {
          reply.str(e->first);
          reply.blob(v);
        }
      net_.send(at, origin, reply.take(), channel());
      if (self.range.hi < position_bound(hi)) {
        auto next = std::next(by_lo_.find(self.range.lo));
        if (next != by_lo_.end()) {
          ByteWriter fwd;
          fwd.u8(kRange);
          fwd.u64(req);
          fwd.u64(origin.value);
          fwd.u8(1);
          fwd.str(lo);
          fwd.str(hi);
          send(at, next->second, fwd.take());
        }
      }
      return;
    }
    case kRangeReply: {
      auto req = in.u64();
      auto n = in.u32();
      auto& slot = replies_[req];
      for (std::uint32_t i = 0; i < n; ++i) {
        auto key = in.str();
        slot.push_back({std::move(key), in.blob()});
      }
      return;
    }
    default:
      Overlay::handle_extra(env, op, in);
  }
}

std::string RangeOverlay::dump() const {
  std::ostringstream os;
  for (const auto& [lo, id] : by_lo_) {
    const auto& p = peers_.at(id);
    os << id_.value << ' ' << id.value << " [" << p.range.lo << ',' << p.range.hi << ") " << p.store.size() << '\n';
  }
  return os.str();
}

std::vector<KeyValue> RangeOverlay::contents() const {
  std::vector<KeyValue> out;
  for (const auto& [id, p] : peers_)
    for (const auto& [k, vs] : p.store)
      for (const auto& v : vs) out.push_back({k, v});
  return out;
}

void RangeOverlay::check_invariants() const {
  if (peers_.empty()) return;
  if (by_lo_.size() != peers_.size()) throw std::logic_error("range table out of sync");
  std::uint64_t expect = options_.domain_lo;
  for (const auto& [lo, id] : by_lo_) {
    const auto& r = peers_.at(id).range;
    if (r.lo != lo || r.lo != expect || r.hi <= r.lo)
      throw std::logic_error("ranges do not partition the domain at peer " + net::to_string(id));
    expect = r.hi;
  }
  if (expect != options_.domain_hi) throw std::logic_error("ranges do not cover the domain");
  for (const auto& [id, p] : peers_)
    for (const auto& [k, v] : p.store) {
      auto pos = position_of(k);
      if (pos < p.range.lo || pos >= p.range.hi)
        throw std::logic_error("key '" + k + "' outside the range of peer " + net::to_string(id));
    }
}

}  // namespace wcstore::dht
