#include "wcstore/tpq/distributed.hpp"

#include <algorithm>
#include <iterator>

#include "wcstore/error.hpp"

namespace wcstore::tpq {

NodeSeed seed_for(const PatternNode& node) {
  NodeSeed seed;
  const auto* word = node.predicate ? std::get_if<WordEquals>(&*node.predicate) : nullptr;
  const auto* range = node.predicate ? std::get_if<IntRange>(&*node.predicate) : nullptr;
  if (node.is_wildcard()) {
    if (!word)
      throw Error(Errc::unsupported_wildcard_root,
                  "wildcard node without a word predicate has no index key to seed the join");
    seed.word_key = index::word_key(word->word);
    return seed;
  }
  if (range) {
    seed.value_range = NodeSeed::ValueRange{node.label, range->lo, range->hi};
    return seed;
  }
  seed.tag_key = index::tag_key(node.label);
  if (word) seed.word_key = index::word_key(word->word);
  return seed;
}

void require_seedable(const TreePattern& pattern) {
  for (const auto& n : pattern.nodes()) (void)seed_for(n);
}

const std::vector<Binding>* QueryCache::find(const std::string& fingerprint, std::uint64_t epoch) {
  auto it = entries_.find(fingerprint);
  if (it == entries_.end() || it->second.epoch != epoch) {
    ++misses_;
    return nullptr;
  }
  ++hits_;
  return &it->second.bindings;
}

void QueryCache::store(const std::string& fingerprint, std::uint64_t epoch, std::vector<Binding> bindings) {
  entries_[fingerprint] = Entry{epoch, std::move(bindings)};
}

NodeLists DistributedEvaluator::fetch_candidates(const TreePattern& pattern, net::PeerId via) {
  NodeLists lists;
  for (std::size_t n = 0; n < pattern.size(); ++n) {
    auto seed = seed_for(pattern.node(n));
    PostingList list;
    if (seed.value_range) {
      const auto& r = *seed.value_range;
      list = index_.lookup_value_range(r.tag, r.lo, r.hi, via);
    } else if (seed.tag_key && seed.word_key) {
      auto tags = index_.fetch_key(*seed.tag_key, via);
      auto words = index_.fetch_key(*seed.word_key, via);
      index::normalize(tags);
      index::normalize(words);
      std::set_intersection(tags.begin(), tags.end(), words.begin(), words.end(), std::back_inserter(list));
    } else {
      list = index_.fetch_key(seed.tag_key ? *seed.tag_key : *seed.word_key, via);
      index::normalize(list);
    }
    lists.emplace(n, std::move(list));
  }
  return lists;
}

std::vector<Binding> DistributedEvaluator::evaluate(const TreePattern& pattern, net::PeerId via) {
  pattern.validate();
  require_seedable(pattern);
  auto fingerprint = to_string(pattern);
  auto& cache = caches_[via];
  if (const auto* hit = cache.find(fingerprint, index_.version())) {
    last_hit_ = true;
    return *hit;
  }
  last_hit_ = false;
  auto result = enumerate_bindings(pattern, fetch_candidates(pattern, via));
  cache.store(fingerprint, index_.version(), result);
  return result;
}

}  // namespace wcstore::tpq
