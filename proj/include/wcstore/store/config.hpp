#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "wcstore/dht/overlay.hpp"

namespace wcstore::store {

enum class Backend { centralized, p2p };

std::string_view to_string(Backend backend);

struct OverlaySpec {
  dht::DhtId id;
  dht::OverlayKind kind = dht::OverlayKind::hash;

  bool operator==(const OverlaySpec&) const = default;
};

struct StoreConfig {
  Backend backend = Backend::centralized;
  std::uint64_t peer_count = 4;
  std::vector<OverlaySpec> overlays{{dht::DhtId{0}, dht::OverlayKind::hash},
                                    {dht::DhtId{1}, dht::OverlayKind::range}};
  /// Element names that are resources in addition to document roots.
  std::set<std::string> granularity;
  std::string snapshot_path;
  std::uint64_t seed = 0;
  bool full_table_routing = false;

  bool operator==(const StoreConfig&) const = default;

  /// Throws InvalidConfig.
  void validate() const;
  /// Flat key=value text accepted by parse_config.
  std::string to_text() const;
};

/// Keys: backend, peer_count, overlays ("0:hash,1:range"), granularity
/// ("sec,par"), snapshot_path, seed, full_table_routing. Blank lines and
/// lines starting with '#' are ignored. Throws InvalidConfig.
StoreConfig parse_config(std::string_view text);

}  // namespace wcstore::store
