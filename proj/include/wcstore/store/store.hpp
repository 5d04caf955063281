#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "wcstore/net/network.hpp"
#include "wcstore/rdf/rdf.hpp"
#include "wcstore/store/config.hpp"
#include "wcstore/tpq/pattern.hpp"
#include "wcstore/xml/document.hpp"

namespace wcstore::store {

struct QueryResult {
  /// Resources for the distinct labels bound to return nodes, in
  /// (doc, start) order.
  std::vector<xml::Resource> resources;
  /// Network traffic caused by the query; all zero for the centralized backend.
  net::NetworkStats stats;
};

struct RdfResult {
  std::vector<std::string> projection;
  std::vector<rdf::Row> rows;
};

/// Resource storage and query service. Both backends answer every call
/// identically; only the network statistics differ.
class Store {
 public:
  static std::unique_ptr<Store> create(const StoreConfig& config);
  /// Throws IoFailure or CorruptSnapshot.
  static std::unique_ptr<Store> restore(const std::string& path);
  static std::unique_ptr<Store> restore_bytes(std::span<const std::uint8_t> data);

  virtual ~Store() = default;

  const StoreConfig& config() const { return config_; }

  /// Parses and stores one document; returns the ids of its resources.
  /// Throws MalformedXml or EmptyInput.
  std::vector<std::string> store_resource(std::string_view xml_text);
  /// Throws NotFound.
  virtual xml::Resource get_resource(const std::string& id) = 0;
  /// Throws SyntaxError, UnsupportedWildcardRoot, or InvalidArgument when a
  /// return node is an attribute.
  QueryResult query(std::string_view pattern_text);

  /// Returns the number of triples loaded.
  std::size_t rdf_load(std::string_view tsv);
  RdfResult rdf_query(std::string_view query_text);

  void snapshot(const std::string& path) const;
  Bytes snapshot_bytes() const;

  /// Resource-index probes performed by get_resource so far.
  std::uint64_t probes() const { return probes_; }
  std::size_t document_count() const { return texts_.size(); }
  virtual std::size_t resource_count() const = 0;
  std::size_t triple_count() const { return triples_.size(); }
  /// Cumulative network traffic; zero for the centralized backend.
  virtual net::NetworkStats network_stats() const { return {}; }
  /// Counts, then overlay membership for the p2p backend.
  virtual std::string describe() const;

 protected:
  explicit Store(StoreConfig config) : config_(std::move(config)) {}

  virtual void add_document(xml::Document doc, std::vector<xml::Resource> resources) = 0;
  virtual QueryResult run_query(const tpq::TreePattern& pattern) = 0;
  virtual std::vector<rdf::Row> run_rdf(const rdf::ConjunctiveQuery& query) = 0;
  virtual void add_triples(const std::vector<rdf::Triple>& triples) = 0;

  StoreConfig config_;
  std::uint64_t probes_ = 0;

 private:
  std::map<std::uint64_t, std::string> texts_;
  std::vector<rdf::Triple> triples_;
  std::uint64_t next_doc_ = 1;
};

/// The home peer of a document: peers are 1..peer_count, assigned
/// round-robin by doc_id.
net::PeerId home_peer(std::uint64_t doc_id, std::uint64_t peer_count);

}  // namespace wcstore::store
