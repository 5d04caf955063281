#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wcstore/dht/overlay.hpp"
#include "wcstore/xml/document.hpp"

namespace wcstore::index {

using Posting = xml::StructuralId;
using PostingList = std::vector<Posting>;

/// Wire size of one posting: doc_id, start, end, depth as big-endian u64.
inline constexpr std::size_t kPostingBytes = 32;

void append_posting(Bytes& out, const Posting& p);
Bytes encode_posting(const Posting& p);
Posting decode_posting(std::span<const std::uint8_t> data);
Bytes encode_postings(std::span<const Posting> list);
/// Throws invalid_argument unless the size is a multiple of kPostingBytes.
PostingList decode_postings(std::span<const std::uint8_t> data);

/// Sorts by (doc_id, start) and drops duplicates.
void normalize(PostingList& list);

std::string tag_key(std::string_view tag);
std::string word_key(std::string_view word);
/// Fixed-width, byte-order-preserving rendering of an integer:
/// "N" + 19 digits of (v + 2^63) for negatives, "P" + 19 digits otherwise.
std::string encode_int(std::int64_t v);
std::string value_key(std::string_view tag, std::int64_t v);
/// Exclusive key bound covering every value key of `tag` at or below `hi`.
std::string value_key_after(std::string_view tag, std::int64_t hi);

/// Publishes document postings into a hash overlay (tags, words) and an
/// optional range overlay (integer values), and keeps the posting-count
/// catalog the planner uses for cost estimates.
class Index {
 public:
  Index(dht::Overlay& hash, dht::Overlay* range);

  /// Returns the number of postings published.
  std::size_t index_document(const xml::Document& doc, net::PeerId via);

  PostingList lookup_tag(std::string_view tag, net::PeerId via);
  PostingList lookup_word(std::string_view word, net::PeerId via);
  /// Elements named `tag` whose integer content lies in [lo, hi].
  PostingList lookup_value_range(std::string_view tag, std::int64_t lo, std::int64_t hi, net::PeerId via);

  /// Raw multiset under a hash-overlay key, unsorted, duplicates kept.
  PostingList fetch_key(std::string_view key, net::PeerId via);
  /// Raw multiset from a value-range scan, in key order.
  PostingList fetch_value_range(std::string_view tag, std::int64_t lo, std::int64_t hi, net::PeerId via);

  /// Bumped by every index write.
  std::uint64_t version() const { return version_; }
  /// Number of postings put under each key.
  const std::map<std::string, std::uint64_t>& catalog() const { return catalog_; }

  dht::Overlay& hash_overlay() const { return hash_; }
  dht::Overlay* range_overlay() const { return range_; }

 private:
  /// Word and integer postings for the text of an element or attribute.
  std::size_t publish_value(const std::string& name, const std::string& text, const Posting& owner, net::PeerId via);
  void publish(dht::Overlay& overlay, const std::string& key, const Posting& p, net::PeerId via);

  dht::Overlay& hash_;
  dht::Overlay* range_;
  std::uint64_t version_ = 0;
  std::map<std::string, std::uint64_t> catalog_;
};

/// Sum of catalog counts for value keys of `tag` in [lo, hi].
std::uint64_t value_range_count(const std::map<std::string, std::uint64_t>& catalog, std::string_view tag,
                                std::int64_t lo, std::int64_t hi);

}  // namespace wcstore::index
