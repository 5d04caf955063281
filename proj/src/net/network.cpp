#include "wcstore/net/network.hpp"

#include <sstream>

namespace wcstore::net {

std::string to_string(PeerId id) { return std::to_string(id.value); }

NetworkStats& NetworkStats::operator+=(const NetworkStats& other) {
  messages_sent += other.messages_sent;
  bytes_sent += other.bytes_sent;
  for (const auto& [edge, s] : other.per_edge) {
    auto& mine = per_edge[edge];
    mine.messages += s.messages;
    mine.bytes += s.bytes;
  }
  return *this;
}

NetworkStats NetworkStats::since(const NetworkStats& earlier) const {
  NetworkStats d;
  d.messages_sent = messages_sent - earlier.messages_sent;
  d.bytes_sent = bytes_sent - earlier.bytes_sent;
  for (const auto& [edge, s] : per_edge) {
    EdgeStats e = s;
    if (auto it = earlier.per_edge.find(edge); it != earlier.per_edge.end()) {
      e.messages -= it->second.messages;
      e.bytes -= it->second.bytes;
    }
    if (e.messages != 0 || e.bytes != 0) d.per_edge[edge] = e;
  }
  return d;
}

std::string NetworkStats::report() const {
  std::ostringstream os;
  for (const auto& [edge, s] : per_edge)
    os << edge.first.value << ' ' << edge.second.value << ' ' << s.messages << ' ' << s.bytes << '\n';
  os << "total " << messages_sent << ' ' << bytes_sent << '\n';
  return os.str();
}

void Network::spawn_peer(PeerId id, Handler behavior) {
  if (peers_.contains(id)) throw Error(Errc::duplicate_peer, "peer " + to_string(id));
  peers_.emplace(id, PeerSlot{std::move(behavior), {}});
}

void Network::remove_peer(PeerId id) {
  if (peers_.erase(id) == 0) throw Error(Errc::unknown_peer, "peer " + to_string(id));
}

std::vector<PeerId> Network::peers() const {
  std::vector<PeerId> out;
  out.reserve(peers_.size());
  for (const auto& [id, slot] : peers_) out.push_back(id);
  return out;
}

void Network::bind(PeerId peer, Channel channel, Handler handler) {
  auto it = peers_.find(peer);
  if (it == peers_.end()) throw Error(Errc::unknown_peer, "peer " + to_string(peer));
  it->second.channels[channel] = std::move(handler);
}

void Network::unbind(PeerId peer, Channel channel) {
  if (auto it = peers_.find(peer); it != peers_.end()) it->second.channels.erase(channel);
}

void Network::send(PeerId from, PeerId to, Bytes payload, Channel channel) {
  if (!peers_.contains(from)) throw Error(Errc::unknown_peer, "sender " + to_string(from));
  if (!peers_.contains(to)) throw Error(Errc::unknown_peer, "receiver " + to_string(to));
  Envelope env;
  env.from = from;
  env.to = to;
  env.channel = channel;
  env.size = payload.size();
  env.payload = std::move(payload);
  env.deliver_at = tick_ + 1;
  queue_.push_back(std::move(env));
}

void Network::deliver(const Envelope& env) {
  auto it = peers_.find(env.to);
  if (it == peers_.end()) throw Error(Errc::unknown_peer, "delivery to departed peer " + to_string(env.to));
  if (env.from != env.to) {
    auto bytes = env.size + config_.header_overhead;
    stats_.messages_sent += 1;
    stats_.bytes_sent += bytes;
    auto& edge = stats_.per_edge[{env.from, env.to}];
    edge.messages += 1;
    edge.bytes += bytes;
  }
  ++delivered_;
  auto& slot = it->second;
  if (auto ch = slot.channels.find(env.channel); ch != slot.channels.end()) {
    // Copy: the handler may rebind its own channel.
    auto handler = ch->second;
    handler(env);
  } else if (slot.behavior) {
    slot.behavior(env);
  }
}

NetworkStats Network::run_until_quiescent(std::uint64_t max_ticks) {
  NetworkStats before = stats_;
  std::uint64_t budget_end = tick_ + max_ticks;
  while (!queue_.empty()) {
    if (tick_ >= budget_end)
      throw Error(Errc::tick_budget_exceeded,
                  std::to_string(queue_.size()) + " envelopes pending after " + std::to_string(max_ticks) + " ticks");
    ++tick_;
    // Only envelopes enqueued before this tick are due now; handlers append
    // envelopes for the next tick behind them.
    std::size_t due = 0;
    while (due < queue_.size() && queue_[due].deliver_at <= tick_) ++due;
    for (std::size_t i = 0; i < due; ++i) {
      Envelope env = std::move(queue_.front());
      queue_.pop_front();
      deliver(env);
    }
  }
  return stats_.since(before);
}

}  // namespace wcstore::net
