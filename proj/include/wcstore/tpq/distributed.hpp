#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wcstore/index/index.hpp"
#include "wcstore/net/network.hpp"
#include "wcstore/tpq/join.hpp"
#include "wcstore/tpq/pattern.hpp"

namespace wcstore::tpq {

/// Index lookups that yield the candidates of one pattern node. A tag key
/// and a word key together mean their intersection.
struct NodeSeed {
  std::optional<std::string> tag_key;
  std::optional<std::string> word_key;
  struct ValueRange {
    std::string tag;
    std::int64_t lo;
    std::int64_t hi;
  };
  std::optional<ValueRange> value_range;
};

/// Throws UnsupportedWildcardRoot for a node with no index key: a bare "*"
/// or a "*" carrying an integer range.
NodeSeed seed_for(const PatternNode& node);
/// Checks every node of the pattern has a seed.
void require_seedable(const TreePattern& pattern);

class QueryCache {
 public:
  const std::vector<Binding>* find(const std::string& fingerprint, std::uint64_t epoch);
  void store(const std::string& fingerprint, std::uint64_t epoch, std::vector<Binding> bindings);

  std::uint64_t hits() const { return hits_; }
  std::uint64_t misses() const { return misses_; }
  std::size_t size() const { return entries_.size(); }

 private:
  struct Entry {
    std::uint64_t epoch = 0;
    std::vector<Binding> bindings;
  };
  std::map<std::string, Entry> entries_;
  std::uint64_t hits_ = 0;
  std::uint64_t misses_ = 0;
};

/// Fetches one posting list per pattern node from the overlays to the
/// querying peer and joins them there. Results are cached per peer, keyed by
/// the canonical pattern text and valid for one index version.
class DistributedEvaluator {
 public:
  explicit DistributedEvaluator(index::Index& index) : index_(index) {}

  std::vector<Binding> evaluate(const TreePattern& pattern, net::PeerId via);

  /// Candidate lists as fetched to `via`, before joining.
  NodeLists fetch_candidates(const TreePattern& pattern, net::PeerId via);

  QueryCache& cache(net::PeerId peer) { return caches_[peer]; }
  bool last_was_cache_hit() const { return last_hit_; }

 private:
  index::Index& index_;
  std::map<net::PeerId, QueryCache> caches_;
  bool last_hit_ = false;
};

}  // namespace wcstore::tpq
