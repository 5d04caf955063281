#include "wcstore/index/index.hpp"

#include <algorithm>
#include <limits>
#include <set>

namespace wcstore::index {

void append_posting(Bytes& out, const Posting& p) {
  ByteWriter w(out);
  w.u64(p.doc_id);
  w.u64(p.start);
  w.u64(p.end);
  w.u64(p.depth);
}

Bytes encode_posting(const Posting& p) {
  Bytes out;
  out.reserve(kPostingBytes);
  append_posting(out, p);
  return out;
}

Posting decode_posting(std::span<const std::uint8_t> data) {
  ByteReader r(data);
  Posting p;
  p.doc_id = r.u64();
  p.start = r.u64();
  p.end = r.u64();
  p.depth = r.u64();
  if (!r.done()) throw Error(Errc::invalid_argument, "posting is not 32 bytes");
  return p;
}

Bytes encode_postings(std::span<const Posting> list) {
  Bytes out;
  out.reserve(list.size() * kPostingBytes);
  for (const auto& p : list) append_posting(out, p);
  return out;
}

PostingList decode_postings(std::span<const std::uint8_t> data) {
  if (data.size() % kPostingBytes != 0)
    throw Error(Errc::invalid_argument, "posting list of " + std::to_string(data.size()) + " bytes");
  PostingList out;
  out.reserve(data.size() / kPostingBytes);
  for (std::size_t off = 0; off < data.size(); off += kPostingBytes)
    out.push_back(decode_posting(data.subspan(off, kPostingBytes)));
  return out;
}

void normalize(PostingList& list) {
  std::sort(list.begin(), list.end());
  list.erase(std::unique(list.begin(), list.end()), list.end());
}

std::string tag_key(std::string_view tag) { return "t:" + std::string(tag); }
std::string word_key(std::string_view word) { return "w:" + std::string(word); }

std::string encode_int(std::int64_t v) {
  std::uint64_t mag;
  char sign;
  if (v < 0) {
    sign = 'N';
    mag = static_cast<std::uint64_t>(v) - (std::uint64_t{1} << 63);  // v + 2^63
  } else {
    sign = 'P';
    mag = static_cast<std::uint64_t>(v);
  }
  std::string digits = std::to_string(mag);
  return sign + std::string(19 - digits.size(), '0') + digits;
}

std::string value_key(std::string_view tag, std::int64_t v) {
  return "v:" + std::string(tag) + "=" + encode_int(v);
}

std::string value_key_after(std::string_view tag, std::int64_t hi) {
  if (hi == std::numeric_limits<std::int64_t>::max()) return "v:" + std::string(tag) + "=Q";
  return value_key(tag, hi + 1);
}

std::uint64_t value_range_count(const std::map<std::string, std::uint64_t>& catalog, std::string_view tag,
                                std::int64_t lo, std::int64_t hi) {
  if (lo > hi) return 0;
  std::uint64_t total = 0;
  auto end = catalog.lower_bound(value_key_after(tag, hi));
  for (auto it = catalog.lower_bound(value_key(tag, lo)); it != end; ++it) total += it->second;
  return total;
}

Index::Index(dht::Overlay& hash, dht::Overlay* range) : hash_(hash), range_(range) {
  if (hash.kind() != dht::OverlayKind::hash) throw Error(Errc::invalid_argument, "index needs a hash overlay");
  if (range && range->kind() != dht::OverlayKind::range)
    throw Error(Errc::not_range_capable, "value index needs a range overlay");
}

void Index::publish(dht::Overlay& overlay, const std::string& key, const Posting& p, net::PeerId via) {
  overlay.put(via, key, encode_posting(p));
  ++catalog_[key];
}

std::size_t Index::publish_value(const std::string& name, const std::string& text, const Posting& owner,
                                 net::PeerId via) {
  std::size_t published = 0;
  auto words = xml::words_of(text);
  std::set<std::string> distinct(words.begin(), words.end());
  for (const auto& w : distinct) {
    publish(hash_, word_key(w), owner, via);
    ++published;
  }
  if (auto v = xml::integer_content(text); v && range_) {
    publish(*range_, value_key(name, *v), owner, via);
    ++published;
  }
  return published;
}

std::size_t Index::index_document(const xml::Document& doc, net::PeerId via) {
  if (hash_.empty() || (range_ && range_->empty()))
    throw Error(Errc::no_members, "index overlays have no members");
  ++version_;
  std::size_t published = 0;
  for (const auto& node : doc.nodes()) {
    switch (node.kind) {
      case xml::NodeKind::element:
        publish(hash_, tag_key(node.name), node.label, via);
        ++published;
        break;
      case xml::NodeKind::attribute:
        publish(hash_, tag_key(node.name), node.label, via);
        published += 1 + publish_value(node.name, node.value, node.label, via);
        break;
      case xml::NodeKind::text: {
        const auto& parent = doc.node(*node.parent);
        published += publish_value(parent.name, node.value, parent.label, via);
        break;
      }
    }
  }
  return published;
}

PostingList Index::fetch_key(std::string_view key, net::PeerId via) {
  PostingList out;
  for (const auto& v : hash_.get(via, key)) out.push_back(decode_posting(v));
  return out;
}

PostingList Index::fetch_value_range(std::string_view tag, std::int64_t lo, std::int64_t hi, net::PeerId via) {
  if (!range_) throw Error(Errc::not_range_capable, "no range overlay configured");
  if (lo > hi) throw Error(Errc::invalid_argument, "value range with lo > hi");
  PostingList out;
  for (const auto& kv : range_->get_range(via, value_key(tag, lo), value_key_after(tag, hi)))
    out.push_back(decode_posting(kv.value));
  return out;
}

PostingList Index::lookup_tag(std::string_view tag, net::PeerId via) {
  auto out = fetch_key(tag_key(tag), via);
  normalize(out);
  return out;
}

PostingList Index::lookup_word(std::string_view word, net::PeerId via) {
  auto out = fetch_key(word_key(word), via);
  normalize(out);
  return out;
}

PostingList Index::lookup_value_range(std::string_view tag, std::int64_t lo, std::int64_t hi, net::PeerId via) {
  auto out = fetch_value_range(tag, lo, hi, via);
  normalize(out);
  return out;
}

}  // namespace wcstore::index
