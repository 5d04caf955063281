#include <sstream>

#include "backends.hpp"
#include "wcstore/dht/hash_overlay.hpp"
#include "wcstore/dht/range_overlay.hpp"
#include "wcstore/error.hpp"
#include "wcstore/index/index.hpp"
#include "wcstore/optimizer/executor.hpp"
#include "wcstore/optimizer/planner.hpp"

namespace wcstore::store {

namespace {

constexpr net::Channel kResourceChannel = 0x300;
constexpr net::Channel kResourceReplyChannel = 0x301;
constexpr std::size_t kRewritePasses = 16;

std::string resource_key(std::string_view id) { return "r:" + std::string(id); }

class P2PStore final : public Store, private optimizer::ResourceHost {
 public:
  explicit P2PStore(StoreConfig config) : Store(std::move(config)) {
    for (std::uint64_t p = 1; p <= config_.peer_count; ++p) net_.spawn_peer(net::PeerId{p}, [](const net::Envelope&) {});
    dht::OverlayOptions opts;
    opts.seed = config_.seed;
    opts.full_table_routing = config_.full_table_routing;
    for (const auto& spec : config_.overlays) {
      std::unique_ptr<dht::Overlay> o;
      if (spec.kind == dht::OverlayKind::hash)
        o = std::make_unique<dht::HashOverlay>(net_, spec.id, opts);
      else
        o = std::make_unique<dht::RangeOverlay>(net_, spec.id, opts);
      for (std::uint64_t p = 1; p <= config_.peer_count; ++p) o->join(net::PeerId{p});
      overlays_.push_back(std::move(o));
    }
    std::vector<dht::Overlay*> hashes;
    dht::Overlay* range = nullptr;
    for (auto& o : overlays_) {
      if (o->kind() == dht::OverlayKind::hash)
        hashes.push_back(o.get());
      else if (!range)
        range = o.get();
    }
    hash_ = hashes.front();
    index_ = std::make_unique<index::Index>(*hash_, range);
    triples_ = std::make_unique<rdf::DhtTripleStore>(hashes.size() > 1 ? *hashes[1] : *hashes.front());
  }

  xml::Resource get_resource(const std::string& id) override {
    auto homes = hash_->get(query_peer(), resource_key(id));
    if (homes.empty()) throw Error(Errc::not_found, "no resource " + id);
    ByteReader h(homes.front());
    net::PeerId home{h.u64()};

    std::optional<xml::Resource> found;
    net_.bind(home, kResourceChannel, [&](const net::Envelope& env) {
      ++probes_;
      auto& index = peers_[home].resources;
      auto it = index.find(wcstore::to_string(env.payload));
      ByteWriter reply;
      if (it == index.end()) {
        reply.u8(0);
      } else {
        const auto& r = it->second;
        reply.u8(1);
        reply.u64(r.doc_id);
        reply.u64(r.root_label.start);
        reply.u64(r.root_label.end);
        reply.u64(r.root_label.depth);
        reply.str(r.payload);
      }
      net_.send(home, env.from, reply.take(), kResourceReplyChannel);
    });
    net_.bind(query_peer(), kResourceReplyChannel, [&](const net::Envelope& env) {
      ByteReader in(env.payload);
      if (in.u8() == 0) return;
      xml::Resource r;
      r.resource_id = id;
      r.doc_id = in.u64();
      r.root_label = {r.doc_id, in.u64(), in.u64(), in.u64()};
      r.payload = in.str();
      found = std::move(r);
    });
    net_.send(query_peer(), home, to_bytes(id), kResourceChannel);
    net_.run_until_quiescent();
    net_.unbind(home, kResourceChannel);
    net_.unbind(query_peer(), kResourceReplyChannel);
    if (!found) throw Error(Errc::not_found, "no resource " + id);
    return *found;
  }

  std::size_t resource_count() const override {
    std::size_t n = 0;
    for (const auto& [p, state] : peers_) n += state.resources.size();
    return n;
  }

  net::NetworkStats network_stats() const override { return net_.stats(); }

  std::string describe() const override {
    std::ostringstream out;
    out << Store::describe();
    for (const auto& o : overlays_) out << o->dump();
    const auto& s = net_.stats();
    out << "network " << s.messages_sent << " " << s.bytes_sent << "\n";
    return out.str();
  }

 protected:
  void add_document(xml::Document doc, std::vector<xml::Resource> resources) override {
    auto home = home_peer(doc.doc_id(), config_.peer_count);
    index_->index_document(doc, home);
    auto& state = peers_[home];
    for (auto& r : resources) {
      ByteWriter w;
      w.u64(home.value);
      hash_->put(home, resource_key(r.resource_id), w.take());
      auto id = r.resource_id;
      state.resources.emplace(std::move(id), std::move(r));
    }
    state.docs.emplace(doc.doc_id(), std::move(doc));
  }

  QueryResult run_query(const tpq::TreePattern& pattern) override {
    auto decomposition = optimizer::decompose(pattern);
    optimizer::PlanContext ctx;
    ctx.hash_dht = hash_->id();
    if (index_->range_overlay()) ctx.range_dht = index_->range_overlay()->id();
    ctx.owner = [this](dht::DhtId dht, const std::string& key) { return overlay(dht).owner_of(key); };
    auto plan = optimizer::build_naive_plan(pattern, decomposition, ctx, query_peer());
    optimizer::annotate(plan, index_->catalog());
    plan = optimizer::rewrite(plan, optimizer::default_rules(), kRewritePasses);
    plan = optimizer::place(plan, index_->catalog(), query_peer());
    optimizer::PlanExecutor exec(net_, *index_, this);
    auto run = exec.execute(plan, query_peer());
    return {std::move(run.resources), std::move(run.stats)};
  }

  void add_triples(const std::vector<rdf::Triple>& triples) override {
    triples_->index_triples(triples, query_peer());
  }

  std::vector<rdf::Row> run_rdf(const rdf::ConjunctiveQuery& query) override {
    return triples_->eval(query, query_peer());
  }

 private:
  struct PeerState {
    std::map<std::uint64_t, xml::Document> docs;
    std::unordered_map<std::string, xml::Resource> resources;
  };

  net::PeerId query_peer() const { return net::PeerId{1}; }

  dht::Overlay& overlay(dht::DhtId id) const {
    for (const auto& o : overlays_)
      if (o->id() == id) return *o;
    throw Error(Errc::invalid_argument, "no overlay " + std::to_string(id.value));
  }

  net::PeerId home_of(std::uint64_t doc_id) const override { return home_peer(doc_id, config_.peer_count); }

  std::string serialize(const xml::StructuralId& label) const override {
    auto p = peers_.find(home_of(label.doc_id));
    if (p == peers_.end()) throw Error(Errc::not_found, "no document " + std::to_string(label.doc_id));
    auto d = p->second.docs.find(label.doc_id);
    if (d == p->second.docs.end()) throw Error(Errc::not_found, "no document " + std::to_string(label.doc_id));
    return xml::serialize_subtree(d->second, label);
  }

  net::Network net_;
  std::vector<std::unique_ptr<dht::Overlay>> overlays_;
  dht::Overlay* hash_ = nullptr;
  std::unique_ptr<index::Index> index_;
  std::unique_ptr<rdf::DhtTripleStore> triples_;
  std::map<net::PeerId, PeerState> peers_;
};

}  // namespace

std::unique_ptr<Store> make_p2p(const StoreConfig& config) { return std::make_unique<P2PStore>(config); }

}  // namespace wcstore::store
