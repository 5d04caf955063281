#include "wcstore/dht/overlay.hpp"

namespace wcstore::dht {

std::string_view to_string(OverlayKind kind) { return kind == OverlayKind::hash ? "hash" : "range"; }

Overlay::Overlay(net::Network& net, DhtId id, OverlayOptions options)
    : net_(net), id_(id), options_(options) {}

void Overlay::bind_peer(PeerId peer) {
  net_.bind(peer, channel(), [this](const net::Envelope& env) { on_message(env); });
}

void Overlay::unbind_peer(PeerId peer) { net_.unbind(peer, channel()); }

void Overlay::send(PeerId from, PeerId to, Bytes payload) {
  if (from != to) ++trace_.hops;
  net_.send(from, to, std::move(payload), channel());
}

void Overlay::run() { net_.run_until_quiescent(options_.tick_budget); }

void Overlay::require_member(PeerId peer) const {
  require_nonempty();
  if (!is_member(peer))
    throw Error(Errc::not_member, "peer " + net::to_string(peer) + " is not in dht " + std::to_string(id_.value));
}

void Overlay::require_nonempty() const {
  if (empty()) throw Error(Errc::no_members, "dht " + std::to_string(id_.value) + " has no members");
}

Bytes Overlay::encode_entries(const Store& entries) {
  ByteWriter w;
  w.u8(kTransfer);
  w.u32(static_cast<std::uint32_t>(entries.size()));
  for (const auto& [key, values] : entries) {
    w.str(key);
    w.u32(static_cast<std::uint32_t>(values.size()));
    for (const auto& v : values) w.blob(v);
  }
  return w.take();
}

void Overlay::merge_entries(Store& into, ByteReader& in) {
  auto n = in.u32();
  for (std::uint32_t i = 0; i < n; ++i) {
    auto key = in.str();
    auto count = in.u32();
    auto& slot = into[key];
    for (std::uint32_t j = 0; j < count; ++j) slot.push_back(in.blob());
  }
}

void Overlay::put(PeerId via, std::string_view key, Value value) {
  require_member(via);
  trace_ = {};
  (void)position_of(key);  // validates the key for this overlay's key mode
  ByteWriter w;
  w.u8(kPut);
  w.str(key);
  w.blob(value);
  send(via, via, w.take());
  run();
}

std::vector<Value> Overlay::get(PeerId via, std::string_view key) {
  require_member(via);
  trace_ = {};
  (void)position_of(key);
  auto req = next_request_++;
  ByteWriter w;
  w.u8(kGet);
  w.u64(req);
  w.u64(via.value);
  w.str(key);
  send(via, via, w.take());
  run();
  std::vector<Value> out;
  if (auto it = replies_.find(req); it != replies_.end()) {
    for (auto& kv : it->second) out.push_back(std::move(kv.value));
    replies_.erase(it);
  }
  return out;
}

std::vector<KeyValue> Overlay::get_range(PeerId, std::string_view, std::string_view) {
  throw Error(Errc::not_range_capable, "dht " + std::to_string(id_.value) + " is a hash overlay");
}

void Overlay::route(PeerId at, Bytes payload) {
  // Key is the first string field after the op byte (and, for gets, the
  // request id and origin).
  ByteReader in(payload);
  auto op = in.u8();
  if (op == kGet) {
    in.u64();
    in.u64();
  }
  auto key = in.str();
  auto next = next_hop(at, key);
  send(at, next, std::move(payload));
}

void Overlay::on_message(const net::Envelope& env) {
  ByteReader in(env.payload);
  auto op = static_cast<Op>(in.u8());
  PeerId at = env.to;
  switch (op) {
    case kPut: {
      auto key = in.str();
      if (next_hop(at, key) != at) {
        route(at, env.payload);
        return;
      }
      store_of(at)[key].push_back(in.blob());
      return;
    }
    case kGet: {
      auto req = in.u64();
      PeerId origin{in.u64()};
      auto key = in.str();
      if (next_hop(at, key) != at) {
        route(at, env.payload);
        return;
      }
      ByteWriter w;
      w.u8(kGetReply);
      w.u64(req);
      auto& store = store_of(at);
      auto it = store.find(key);
      std::uint32_t n = it == store.end() ? 0 : static_cast<std::uint32_t>(it->second.size());
      w.u32(n);
      for (std::uint32_t i = 0; i < n; ++i) w.blob(it->second[i]);
      net_.send(at, origin, w.take(), channel());
      return;
    }
    case kGetReply: {
      auto req = in.u64();
      auto n = in.u32();
      auto& slot = replies_[req];
      for (std::uint32_t i = 0; i < n; ++i) slot.push_back({{}, in.blob()});
      return;
    }
    case kTransfer:
      merge_entries(store_of(at), in);
      return;
    default:
      handle_extra(env, op, in);
  }
}

void Overlay::handle_extra(const net::Envelope&, Op op, ByteReader&) {
  throw Error(Errc::invalid_argument, "unexpected overlay op " + std::to_string(op));
}

}  // namespace wcstore::dht
