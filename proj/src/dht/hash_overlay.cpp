#include "wcstore/dht/hash_overlay.hpp"

#include <charconv>
#include <set>
#include <sstream>
#include <stdexcept>

namespace wcstore::dht {

namespace {

std::uint64_t parse_position(std::string_view text) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || p != text.data() + text.size())
    throw Error(Errc::invalid_argument, "numeric key mode needs a decimal key, got '" + std::string(text) + "'");
  return v;
}

// (a, b] on the ring.
bool in_arc(std::uint64_t a, std::uint64_t b, std::uint64_t k) {
  if (a < b) return a < k && k <= b;
  return k > a || k <= b;
}

}  // namespace

HashOverlay::HashOverlay(net::Network& net, DhtId id, OverlayOptions options)
    : Overlay(net, id, options) {}

std::uint64_t HashOverlay::position_of(std::string_view key) const {
  if (key.empty()) throw Error(Errc::invalid_argument, "empty key");
  if (options_.key_mode == KeyMode::numeric) return parse_position(key);
  return mix64(fnv1a64(key, 0xcbf29ce484222325ULL ^ options_.seed));
}

std::uint64_t HashOverlay::peer_position(PeerId peer) const {
  if (options_.key_mode == KeyMode::numeric) return peer.value;
  return mix64(fnv1a64("peer:" + std::to_string(peer.value), 0xcbf29ce484222325ULL ^ options_.seed));
}

std::vector<PeerId> HashOverlay::members() const {
  std::vector<PeerId> out;
  for (const auto& [id, p] : ring_) out.push_back(id);
  return out;
}

bool HashOverlay::owns(PeerId at, std::uint64_t position) const {
  const auto& p = ring_.at(at);
  if (p.pred == at) return true;
  return in_arc(ring_.at(p.pred).position, p.position, position);
}

PeerId HashOverlay::owner_of_position(std::uint64_t position) const {
  auto it = by_position_.lower_bound(position);
  if (it == by_position_.end()) it = by_position_.begin();
  return it->second;
}

PeerId HashOverlay::owner_of(std::string_view key) const {
  require_nonempty();
  return owner_of_position(position_of(key));
}

PeerId HashOverlay::next_hop(PeerId at, std::string_view key) const {
  auto pos = position_of(key);
  if (owns(at, pos)) return at;
  if (options_.full_table_routing) return owner_of_position(pos);
  return ring_.at(at).succ;
}

void HashOverlay::join(PeerId peer) {
  if (!net_.has_peer(peer)) throw Error(Errc::unknown_peer, "peer " + net::to_string(peer));
  if (ring_.contains(peer))
    throw Error(Errc::already_member, "peer " + net::to_string(peer) + " already in dht " + std::to_string(id_.value));
  auto pos = peer_position(peer);
  if (by_position_.contains(pos))
    throw Error(Errc::invalid_argument, "ring position collision for peer " + net::to_string(peer));
  trace_ = {};
  bind_peer(peer);
  if (ring_.empty()) {
    ring_[peer] = RingPeer{pos, peer, peer, {}};
    by_position_[pos] = peer;
    return;
  }
  // The joiner asks a bootstrap member to route its join to the current owner
  // of its position; that owner splits its arc.
  PeerId bootstrap = ring_.begin()->first;
  ByteWriter w;
  w.u8(kJoin);
  w.u64(peer.value);
  w.u64(pos);
  send(peer, bootstrap, w.take());
  run();
}

void HashOverlay::handle_extra(const net::Envelope& env, Op op, ByteReader& in) {
  if (op != kJoin) {
    Overlay::handle_extra(env, op, in);
    return;
  }
  PeerId at = env.to;
  PeerId joiner{in.u64()};
  auto pos = in.u64();
  if (!owns(at, pos)) {
    auto next = options_.full_table_routing ? owner_of_position(pos) : ring_.at(at).succ;
    send(at, next, env.payload);
    return;
  }
  auto& self = ring_.at(at);
  auto old_pred = self.pred;
  auto pred_pos = ring_.at(old_pred).position;
  Store moved;
  for (auto it = self.store.begin(); it != self.store.end();) {
    auto kp = position_of(it->first);
    bool to_joiner = old_pred == at ? !in_arc(pos, self.position, kp) : in_arc(pred_pos, pos, kp);
    if (to_joiner) {
      moved.insert(std::move(*it));
      it = self.store.erase(it);
    } else {
      ++it;
    }
  }
  ring_[joiner] = RingPeer{pos, at, old_pred, {}};
  by_position_[pos] = joiner;
  ring_.at(old_pred).succ = joiner;
  ring_.at(at).pred = joiner;
  send(at, joiner, encode_entries(moved));
}

void HashOverlay::leave(PeerId peer) {
  require_member(peer);
  trace_ = {};
  auto node = ring_.at(peer);
  by_position_.erase(node.position);
  ring_.erase(peer);
  if (node.succ == peer) {
    unbind_peer(peer);
    return;
  }
  ring_.at(node.pred).succ = node.succ;
  ring_.at(node.succ).pred = node.pred;
  send(peer, node.succ, encode_entries(node.store));
  run();
  unbind_peer(peer);
}

std::map<std::string, std::size_t> HashOverlay::held_keys(PeerId peer) const {
  std::map<std::string, std::size_t> out;
  for (const auto& [k, v] : ring_.at(peer).store) out[k] = v.size();
  return out;
}

std::string HashOverlay::dump() const {
  std::ostringstream os;
  for (const auto& [pos, id] : by_position_)
    os << id_.value << ' ' << id.value << ' ' << pos << ' ' << ring_.at(id).store.size() << '\n';
  return os.str();
}

std::vector<KeyValue> HashOverlay::contents() const {
  std::vector<KeyValue> out;
  for (const auto& [id, p] : ring_)
    for (const auto& [k, vs] : p.store)
      for (const auto& v : vs) out.push_back({k, v});
  return out;
}

void HashOverlay::check_invariants() const {
  if (ring_.empty()) return;
  if (ring_.size() != by_position_.size()) throw std::logic_error("position table out of sync");
  // Successor walk is a permutation of the members, in position order.
  std::set<PeerId> seen;
  auto start = by_position_.begin()->second;
  auto cur = start;
  auto expected = by_position_.begin();
  do {
    if (!seen.insert(cur).second) throw std::logic_error("successor walk revisits " + net::to_string(cur));
    if (expected == by_position_.end() || expected->second != cur)
      throw std::logic_error("successor order disagrees with ring positions at " + net::to_string(cur));
    ++expected;
    const auto& p = ring_.at(cur);
    if (ring_.at(p.succ).pred != cur) throw std::logic_error("pred/succ mismatch at " + net::to_string(cur));
    cur = p.succ;
  } while (cur != start);
  if (seen.size() != ring_.size()) throw std::logic_error("successor walk misses members");
  for (const auto& [id, p] : ring_)
    for (const auto& [k, v] : p.store)
      if (!owns(id, position_of(k))) throw std::logic_error("key '" + k + "' held by non-owner " + net::to_string(id));
}

}  // namespace wcstore::dht
