#include "backends.hpp"
#include "wcstore/error.hpp"
#include "wcstore/tpq/naive.hpp"

namespace wcstore::store {

namespace {

class CentralizedStore final : public Store {
 public:
  explicit CentralizedStore(StoreConfig config) : Store(std::move(config)) {}

  xml::Resource get_resource(const std::string& id) override {
    ++probes_;
    auto it = resources_.find(id);
    if (it == resources_.end()) throw Error(Errc::not_found, "no resource " + id);
    return it->second;
  }

  std::size_t resource_count() const override { return resources_.size(); }

 protected:
  void add_document(xml::Document doc, std::vector<xml::Resource> resources) override {
    for (auto& r : resources) {
      auto id = r.resource_id;
      resources_.emplace(std::move(id), std::move(r));
    }
    slot_.emplace(doc.doc_id(), docs_.size());
    docs_.push_back(std::move(doc));
  }

  QueryResult run_query(const tpq::TreePattern& pattern) override {
    QueryResult result;
    for (const auto& label : returned_labels(pattern, tpq::eval_naive(pattern, docs_))) {
      const auto& doc = docs_[slot_.at(label.doc_id)];
      result.resources.push_back({xml::resource_id_for(label), label.doc_id, label, xml::serialize_subtree(doc, label)});
    }
    return result;
  }

  void add_triples(const std::vector<rdf::Triple>& triples) override { triples_.index_triples(triples); }

  std::vector<rdf::Row> run_rdf(const rdf::ConjunctiveQuery& query) override {
    return rdf::eval_conjunctive(query, triples_.lookup());
  }

 private:
  std::vector<xml::Document> docs_;
  std::map<std::uint64_t, std::size_t> slot_;
  std::unordered_map<std::string, xml::Resource> resources_;
  rdf::LocalTripleStore triples_;
};

}  // namespace

std::unique_ptr<Store> make_centralized(const StoreConfig& config) {
  return std::make_unique<CentralizedStore>(config);
}

}  // namespace wcstore::store
