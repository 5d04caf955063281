#pragma once

#include <memory>

#include "wcstore/dht/hash_overlay.hpp"
#include "wcstore/dht/range_overlay.hpp"
#include "wcstore/index/index.hpp"
#include "wcstore/net/network.hpp"

namespace wcstore::gen {

/// Peers 1..n, each a member of one hash and one range overlay, with an index
/// over both.
struct Cluster {
  explicit Cluster(std::size_t n) {
    for (std::uint64_t p = 1; p <= n; ++p) {
      net.spawn_peer(net::PeerId{p}, nullptr);
      hash.join(net::PeerId{p});
      range.join(net::PeerId{p});
    }
  }

  net::Network net;
  dht::HashOverlay hash{net, dht::DhtId{0}};
  dht::RangeOverlay range{net, dht::DhtId{1}};
  index::Index idx{hash, &range};
};

}  // namespace wcstore::gen
