#include "wcstore/store/store.hpp"

#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "backends.hpp"
#include "wcstore/error.hpp"
#include "wcstore/tpq/distributed.hpp"

namespace wcstore::store {

namespace {

constexpr std::string_view kMagic = "WCSNAP01";

enum Section : std::uint8_t { kConfig = 1, kDoc = 2, kResource = 3, kTriple = 4 };

void record(ByteWriter& out, Section tag, const Bytes& body) {
  out.u8(tag);
  out.blob(body);
}

[[noreturn]] void corrupt(const std::string& what) { throw Error(Errc::corrupt_snapshot, what); }

}  // namespace

net::PeerId home_peer(std::uint64_t doc_id, std::uint64_t peer_count) {
  return net::PeerId{(doc_id - 1) % peer_count + 1};
}

std::vector<xml::StructuralId> returned_labels(const tpq::TreePattern& pattern,
                                               const std::vector<tpq::Binding>& bindings) {
  std::set<xml::StructuralId> labels;
  auto ret = pattern.return_nodes();
  for (const auto& b : bindings)
    for (auto r : ret) labels.insert(b[r]);
  return {labels.begin(), labels.end()};
}

std::unique_ptr<Store> Store::create(const StoreConfig& config) {
  config.validate();
  if (config.backend == Backend::p2p) return make_p2p(config);
  return make_centralized(config);
}

std::vector<std::string> Store::store_resource(std::string_view xml_text) {
  auto doc = xml::parse_document(xml_text, next_doc_);
  auto resources = xml::extract_resources(doc, config_.granularity);
  std::vector<std::string> ids;
  for (const auto& r : resources) ids.push_back(r.resource_id);
  texts_.emplace(next_doc_, std::string(xml_text));
  ++next_doc_;
  add_document(std::move(doc), std::move(resources));
  return ids;
}

QueryResult Store::query(std::string_view pattern_text) {
  auto pattern = tpq::parse_pattern(pattern_text);
  for (auto r : pattern.return_nodes())
    if (pattern.node(r).is_attribute())
      throw Error(Errc::invalid_argument,
                  "query results are resources; return node " + pattern.node(r).label + " is an attribute");
  tpq::require_seedable(pattern);
  return run_query(pattern);
}

std::size_t Store::rdf_load(std::string_view tsv) {
  auto triples = rdf::parse_triples(tsv);
  add_triples(triples);
  triples_.insert(triples_.end(), triples.begin(), triples.end());
  return triples.size();
}

RdfResult Store::rdf_query(std::string_view query_text) {
  auto q = rdf::parse_query(query_text);
  return {q.projection, run_rdf(q)};
}

std::string Store::describe() const {
  std::ostringstream out;
  out << "backend " << to_string(config_.backend) << "\n"
      << "documents " << document_count() << "\n"
      << "resources " << resource_count() << "\n"
      << "triples " << triple_count() << "\n"
      << "probes " << probes_ << "\n";
  return out.str();
}

Bytes Store::snapshot_bytes() const {
  Bytes data;
  ByteWriter out(data);
  out.raw(kMagic);
  record(out, kConfig, to_bytes(config_.to_text()));
  for (const auto& [id, text] : texts_) {
    Bytes body;
    ByteWriter b(body);
    b.u64(id);
    b.str(text);
    record(out, kDoc, body);
    auto doc = xml::parse_document(text, id);
    for (const auto& r : xml::extract_resources(doc, config_.granularity)) {
      Bytes rb;
      ByteWriter w(rb);
      w.str(r.resource_id);
      w.u64(r.doc_id);
      w.u64(r.root_label.start);
      w.u64(r.root_label.end);
      w.u64(r.root_label.depth);
      record(out, kResource, rb);
    }
  }
  for (const auto& t : triples_) record(out, kTriple, to_bytes(rdf::to_text(t)));
  out.u64(fnv1a64(data));
  return data;
}

void Store::snapshot(const std::string& path) const {
  auto data = snapshot_bytes();
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(Errc::io_failure, "cannot open '" + path + "' for writing");
  f.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!f) throw Error(Errc::io_failure, "write to '" + path + "' failed");
}

std::unique_ptr<Store> Store::restore(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::io_failure, "cannot open snapshot '" + path + "'");
  Bytes data((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return restore_bytes(data);
}

std::unique_ptr<Store> Store::restore_bytes(std::span<const std::uint8_t> data) {
  if (data.size() < kMagic.size() + 8) corrupt("snapshot is too short");
  auto body = data.first(data.size() - 8);
  ByteReader tail(data.last(8), Errc::corrupt_snapshot);
  if (tail.u64() != fnv1a64(body)) corrupt("snapshot checksum mismatch");
  ByteReader in(body, Errc::corrupt_snapshot);
  if (wcstore::to_string(in.take(kMagic.size())) != kMagic) corrupt("not a store snapshot");

  std::unique_ptr<Store> store;
  std::vector<std::string> expected_resources;
  std::vector<std::string> restored_resources;
  std::string triples;
  while (!in.done()) {
    auto tag = in.u8();
    auto payload = in.blob();
    ByteReader rec(payload, Errc::corrupt_snapshot);
    if (tag == kConfig) {
      if (store) corrupt("snapshot holds two config sections");
      try {
        store = create(parse_config(wcstore::to_string(payload)));
      } catch (const Error& e) {
        corrupt(std::string("snapshot config is invalid: ") + e.what());
      }
      continue;
    }
    if (!store) corrupt("snapshot section before the config section");
    switch (tag) {
      case kDoc: {
        auto id = rec.u64();
        auto text = rec.str();
        if (id != store->next_doc_) corrupt("document ids in snapshot are not consecutive");
        auto ids = store->store_resource(text);
        restored_resources.insert(restored_resources.end(), ids.begin(), ids.end());
        break;
      }
      case kResource: {
        auto id = rec.str();
        auto doc = rec.u64();
        xml::StructuralId label{doc, rec.u64(), rec.u64(), rec.u64()};
        if (xml::resource_id_for(label) != id) corrupt("resource record " + id + " does not match its label");
        expected_resources.push_back(id);
        break;
      }
      case kTriple:
        triples += wcstore::to_string(payload) + "\n";
        break;
      default:
        corrupt("unknown snapshot section " + std::to_string(tag));
    }
  }
  if (!store) corrupt("snapshot has no config section");
  if (expected_resources != restored_resources) corrupt("snapshot resources do not match its documents");
  if (!triples.empty()) store->rdf_load(triples);
  return store;
}

}  // namespace wcstore::store
