#include "wcstore/optimizer/executor.hpp"

#include <algorithm>
#include <iterator>
#include <set>

#include "wcstore/error.hpp"

namespace wcstore::optimizer {

namespace {

[[noreturn]] void malformed(const std::string& what) { throw Error(Errc::malformed_plan, what); }

}  // namespace

Bytes encode_output(const tpq::NodeLists& lists, const std::vector<std::size_t>& nodes, bool single_list) {
  Bytes out;
  if (nodes.empty()) return out;
  if (single_list) {
    auto it = lists.find(nodes.front());
    if (it != lists.end())
      for (const auto& p : it->second) index::append_posting(out, p);
    return out;
  }
  bool any = false;
  for (auto n : nodes) {
    auto it = lists.find(n);
    any = any || (it != lists.end() && !it->second.empty());
  }
  if (!any) return out;
  ByteWriter w(out);
  for (auto n : nodes) {
    auto it = lists.find(n);
    std::size_t count = it == lists.end() ? 0 : it->second.size();
    w.u32(static_cast<std::uint32_t>(count));
    for (std::size_t i = 0; i < count; ++i) index::append_posting(out, it->second[i]);
  }
  return out;
}

tpq::NodeLists decode_output(std::span<const std::uint8_t> data, const std::vector<std::size_t>& nodes,
                             bool single_list) {
  tpq::NodeLists lists;
  if (single_list) {
    auto list = index::decode_postings(data);
    for (auto n : nodes) lists[n] = list;
    return lists;
  }
  for (auto n : nodes) lists[n];
  if (data.empty()) return lists;
  ByteReader in(data, Errc::malformed_plan);
  for (auto n : nodes) {
    auto count = in.u32();
    lists[n] = index::decode_postings(in.take(std::size_t{count} * index::kPostingBytes));
  }
  if (!in.done()) malformed("trailing bytes in shipped lists");
  return lists;
}

ExecutionResult PlanExecutor::execute(const Plan& plan, PeerId via) {
  check_well_formed(plan);
  for (const auto* n : preorder(*plan.root))
    if (!net_.has_peer(n->site))
      throw Error(Errc::plan_site_unreachable,
                  std::string(to_string(n->kind)) + " is placed on peer " + std::to_string(n->site.value) +
                      ", which is not a live peer");
  if (plan.root->kind == OpKind::recompose && plan.root->site != via)
    malformed("Recompose runs at peer " + std::to_string(plan.root->site.value) + " but the query came from " +
              std::to_string(via.value));
  auto before = net_.stats();
  ExecutionResult result;
  result.lists = eval(plan, *plan.root, result);
  result.stats = net_.stats().since(before);
  return result;
}

tpq::NodeLists PlanExecutor::eval(const Plan& plan, const PlanNode& n, ExecutionResult& result) {
  auto single = [&](index::PostingList list) {
    tpq::NodeLists out;
    for (auto v : n.nodes) out[v] = list;
    return out;
  };
  switch (n.kind) {
    case OpKind::index_lookup:
      if (n.dht != index_.hash_overlay().id())
        malformed("IndexLookup names overlay " + std::to_string(n.dht.value) + ", not the hash index overlay");
      return single(index_.fetch_key(n.key, n.site));
    case OpKind::range_lookup:
      if (!index_.range_overlay() || n.dht != index_.range_overlay()->id())
        malformed("RangeLookup names overlay " + std::to_string(n.dht.value) + ", not the range index overlay");
      return single(index_.fetch_value_range(n.tag, n.lo, n.hi, n.site));
    case OpKind::at:
      return eval(plan, *n.children[0], result);
    case OpKind::ship:
      return ship(n, eval(plan, *n.children[0], result));
    case OpKind::intersect: {
      if (n.nodes.size() != 1) malformed("Intersect must cover exactly one pattern node");
      auto v = n.nodes.front();
      auto a = eval(plan, *n.children[0], result);
      auto b = eval(plan, *n.children[1], result);
      if (!a.contains(v) || !b.contains(v)) malformed("Intersect inputs do not cover its pattern node");
      auto& x = a[v];
      auto& y = b[v];
      index::normalize(x);
      index::normalize(y);
      index::PostingList both;
      std::set_intersection(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(both));
      return single(std::move(both));
    }
    case OpKind::struct_join: {
      tpq::NodeLists lists;
      for (const auto& c : n.children)
        for (auto& [v, list] : eval(plan, *c, result)) lists[v] = std::move(list);
      if (!lists.contains(n.parent_node) || !lists.contains(n.child_node))
        malformed("StructJoin inputs do not cover both ends of its edge");
      tpq::reduce(plan.pattern, lists);
      return lists;
    }
    case OpKind::recompose: {
      auto lists = eval(plan, *n.children[0], result);
      for (std::size_t v = 0; v < plan.pattern.size(); ++v)
        if (!lists.contains(v)) malformed("Recompose input does not cover pattern node " + std::to_string(v));
      result.bindings = tpq::enumerate_bindings(plan.pattern, lists);
      if (host_) {
        std::set<xml::StructuralId> labels;
        for (const auto& b : result.bindings)
          for (auto r : plan.pattern.return_nodes()) labels.insert(b[r]);
        result.resources = fetch({labels.begin(), labels.end()}, n.site);
      }
      return lists;
    }
  }
  malformed("unknown operator");
}

tpq::NodeLists PlanExecutor::ship(const PlanNode& n, tpq::NodeLists lists) {
  const auto& from = *n.children[0];
  bool single = from.single_list();
  auto payload = encode_output(lists, from.nodes, single);
  Bytes received;
  net_.bind(n.site, kShipChannel, [&](const net::Envelope& env) { received = env.payload; });
  net_.send(from.site, n.site, std::move(payload), kShipChannel);
  net_.run_until_quiescent();
  net_.unbind(n.site, kShipChannel);
  return decode_output(received, from.nodes, single);
}

std::vector<xml::Resource> PlanExecutor::fetch(const std::vector<xml::StructuralId>& labels, PeerId via) {
  std::map<PeerId, std::vector<xml::StructuralId>> by_home;
  for (const auto& l : labels) by_home[host_->home_of(l.doc_id)].push_back(l);
  std::map<xml::StructuralId, std::string> payloads;
  for (const auto& [home, wanted] : by_home) {
    if (!net_.has_peer(home))
      throw Error(Errc::plan_site_unreachable, "home peer " + std::to_string(home.value) + " is not live");
    net_.bind(home, kFetchChannel, [&, home = home](const net::Envelope& env) {
      auto asked = index::decode_postings(env.payload);
      ByteWriter reply;
      reply.u32(static_cast<std::uint32_t>(asked.size()));
      for (const auto& l : asked) reply.str(host_->serialize(l));
      net_.send(home, env.from, reply.take(), kFetchReplyChannel);
    });
    net_.bind(via, kFetchReplyChannel, [&, wanted = &wanted](const net::Envelope& env) {
      ByteReader in(env.payload, Errc::malformed_plan);
      auto count = in.u32();
      if (count != wanted->size()) malformed("fetch reply has the wrong number of resources");
      for (std::uint32_t i = 0; i < count; ++i) payloads[(*wanted)[i]] = in.str();
    });
    net_.send(via, home, index::encode_postings(wanted), kFetchChannel);
    net_.run_until_quiescent();
    net_.unbind(home, kFetchChannel);
    net_.unbind(via, kFetchReplyChannel);
  }
  std::vector<xml::Resource> out;
  for (const auto& l : labels)
    out.push_back({xml::resource_id_for(l), l.doc_id, l, payloads.at(l)});
  return out;
}

}  // namespace wcstore::optimizer
