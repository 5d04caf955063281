#include "wcstore/optimizer/planner.hpp"

#include <algorithm>
#include <limits>

#include "wcstore/error.hpp"
#include "wcstore/index/index.hpp"
#include "wcstore/tpq/distributed.hpp"

namespace wcstore::optimizer {

namespace {

using Node = std::unique_ptr<PlanNode>;

bool is_range_node(const tpq::PatternNode& n) {
  return n.predicate && std::holds_alternative<tpq::IntRange>(*n.predicate);
}

Node make(OpKind kind, PeerId site, std::vector<std::size_t> nodes) {
  auto n = std::make_unique<PlanNode>();
  n->kind = kind;
  n->site = site;
  n->nodes = std::move(nodes);
  return n;
}

Node wrap_at(Node leaf) {
  auto at = make(OpKind::at, leaf->site, leaf->nodes);
  at->est_rows = leaf->est_rows;
  at->est_bytes = leaf->est_bytes;
  at->children.push_back(std::move(leaf));
  return at;
}

std::vector<std::size_t> merged(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  std::vector<std::size_t> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

Node leaf_for(const tpq::TreePattern& pattern, std::size_t n, const PlanContext& ctx, PeerId query_peer) {
  auto seed = tpq::seed_for(pattern.node(n));
  auto lookup = [&](const std::string& key) {
    auto leaf = make(OpKind::index_lookup, ctx.owner(ctx.hash_dht, key), {n});
    leaf->dht = ctx.hash_dht;
    leaf->key = key;
    return wrap_at(std::move(leaf));
  };
  if (seed.value_range) {
    if (!ctx.range_dht)
      throw Error(Errc::not_range_capable, "pattern has an integer range but no range overlay is configured");
    const auto& r = *seed.value_range;
    auto leaf = make(OpKind::range_lookup, ctx.owner(*ctx.range_dht, index::value_key(r.tag, r.lo)), {n});
    leaf->dht = *ctx.range_dht;
    leaf->tag = r.tag;
    leaf->lo = r.lo;
    leaf->hi = r.hi;
    return wrap_at(std::move(leaf));
  }
  if (seed.tag_key && seed.word_key) {
    auto both = make(OpKind::intersect, query_peer, {n});
    both->children.push_back(lookup(*seed.tag_key));
    both->children.push_back(lookup(*seed.word_key));
    return both;
  }
  return lookup(seed.tag_key ? *seed.tag_key : *seed.word_key);
}

Node join(const tpq::TreePattern& pattern, std::size_t child, Node upper, Node lower, PeerId site) {
  auto j = make(OpKind::struct_join, site, merged(upper->nodes, lower->nodes));
  j->parent_node = *pattern.node(child).parent;
  j->child_node = child;
  j->axis = pattern.node(child).axis;
  j->children.push_back(std::move(upper));
  j->children.push_back(std::move(lower));
  return j;
}

std::uint64_t multi_list_bytes(const std::map<std::size_t, std::uint64_t>& rows) {
  std::uint64_t total = 0;
  bool any = false;
  for (const auto& [n, r] : rows) {
    total += 4 + index::kPostingBytes * r;
    any = any || r > 0;
  }
  return any ? total : 0;
}

void annotate_node(const tpq::TreePattern& pattern, PlanNode& n, const PostingStats& stats) {
  for (auto& c : n.children) annotate_node(pattern, *c, stats);
  auto single = [&](std::uint64_t count) {
    n.est_rows.clear();
    for (auto v : n.nodes) n.est_rows[v] = count;
    n.est_bytes = index::kPostingBytes * count;
  };
  switch (n.kind) {
    case OpKind::index_lookup: {
      auto it = stats.find(n.key);
      single(it == stats.end() ? 0 : it->second);
      break;
    }
    case OpKind::range_lookup:
      single(index::value_range_count(stats, n.tag, n.lo, n.hi));
      break;
    case OpKind::intersect: {
      std::uint64_t m = std::numeric_limits<std::uint64_t>::max();
      for (const auto& c : n.children)
        for (const auto& [v, r] : c->est_rows) m = std::min(m, r);
      single(n.children.empty() ? 0 : m);
      break;
    }
    case OpKind::struct_join: {
      std::map<std::size_t, std::uint64_t> rows;
      for (const auto& c : n.children)
        for (const auto& [v, r] : c->est_rows) {
          auto [it, fresh] = rows.emplace(v, r);
          if (!fresh) it->second = std::min(it->second, r);
        }
      for (auto it = rows.rbegin(); it != rows.rend(); ++it) {
        const auto& pn = pattern.node(it->first);
        if (!pn.parent || pn.axis != tpq::Axis::child) continue;
        auto p = rows.find(*pn.parent);
        if (p != rows.end()) p->second = std::min(p->second, it->second);
      }
      bool empty = std::any_of(rows.begin(), rows.end(), [](const auto& kv) { return kv.second == 0; });
      if (empty)
        for (auto& [v, r] : rows) r = 0;
      n.est_rows = std::move(rows);
      n.est_bytes = multi_list_bytes(n.est_rows);
      break;
    }
    case OpKind::ship:
    case OpKind::at:
      n.est_rows = n.children.empty() ? std::map<std::size_t, std::uint64_t>{} : n.children[0]->est_rows;
      n.est_bytes = n.children.empty() ? 0 : n.children[0]->est_bytes;
      break;
    case OpKind::recompose:
      n.est_rows = n.children.empty() ? std::map<std::size_t, std::uint64_t>{} : n.children[0]->est_rows;
      n.est_bytes = 0;
      break;
  }
}

void strip_ships(Node& slot) {
  while (slot->kind == OpKind::ship && slot->children.size() == 1) slot = std::move(slot->children[0]);
  for (auto& c : slot->children) strip_ships(c);
}

void insert_ships(PlanNode& n) {
  for (auto& c : n.children) {
    insert_ships(*c);
    if (n.kind != OpKind::ship && c->site != n.site) {
      auto ship = make(OpKind::ship, n.site, c->nodes);
      ship->est_rows = c->est_rows;
      ship->est_bytes = c->est_bytes;
      ship->children.push_back(std::move(c));
      c = std::move(ship);
    }
  }
}

/// Slot holding the operator with preorder index `at`.
Node* slot_at(Node& root, std::size_t at) {
  std::size_t counter = 0;
  std::function<Node*(Node&)> walk = [&](Node& slot) -> Node* {
    if (counter++ == at) return &slot;
    for (auto& c : slot->children)
      if (auto* found = walk(c)) return found;
    return nullptr;
  };
  return walk(root);
}

const PlanNode& through_ship(const PlanNode& n) {
  return n.kind == OpKind::ship && n.children.size() == 1 ? *n.children[0] : n;
}

void place_node(PlanNode& n, PeerId query_peer) {
  for (auto& c : n.children) place_node(*c, query_peer);
  switch (n.kind) {
    case OpKind::index_lookup:
    case OpKind::range_lookup:
      break;
    case OpKind::at:
      if (!n.children.empty()) n.site = n.children[0]->site;
      break;
    case OpKind::recompose:
      n.site = query_peer;
      break;
    case OpKind::ship:
      break;
    case OpKind::intersect:
    case OpKind::struct_join: {
      const PlanNode* best = nullptr;
      bool tie = false;
      for (const auto& c : n.children) {
        if (!best || c->est_bytes > best->est_bytes) {
          best = c.get();
          tie = false;
        } else if (c->est_bytes == best->est_bytes && c->site != best->site) {
          tie = true;
        }
      }
      if (best) n.site = tie ? query_peer : best->site;
      break;
    }
  }
}

void all_at(PlanNode& n, PeerId query_peer) {
  for (auto& c : n.children) all_at(*c, query_peer);
  if (n.kind == OpKind::at && !n.children.empty())
    n.site = n.children[0]->site;
  else if (!n.is_leaf())
    n.site = query_peer;
}

}  // namespace

Decomposition decompose(const tpq::TreePattern& pattern) {
  pattern.validate();
  tpq::require_seedable(pattern);
  Decomposition d;
  std::vector<std::size_t> group(pattern.size());
  for (std::size_t n = 0; n < pattern.size(); ++n) {
    const auto& pn = pattern.node(n);
    bool range = is_range_node(pn);
    if (!range && pn.parent && !is_range_node(pattern.node(*pn.parent))) {
      group[n] = group[*pn.parent];
      d.subqueries[group[n]].nodes.push_back(n);
      continue;
    }
    group[n] = d.subqueries.size();
    d.subqueries.push_back({range ? dht::OverlayKind::range : dht::OverlayKind::hash, {n}});
    if (pn.parent) d.recomposition.push_back({*pn.parent, n, pn.axis});
  }
  d.return_nodes = pattern.return_nodes();
  return d;
}

Plan build_naive_plan(const tpq::TreePattern& pattern, const Decomposition& decomposition,
                      const PlanContext& context, PeerId query_peer) {
  Node whole;
  for (const auto& sq : decomposition.subqueries) {
    if (sq.overlay == dht::OverlayKind::range && !context.range_dht)
      throw Error(Errc::not_range_capable, "pattern has an integer range but no range overlay is configured");
    Node fragment = leaf_for(pattern, sq.nodes.front(), context, query_peer);
    for (std::size_t i = 1; i < sq.nodes.size(); ++i) {
      auto n = sq.nodes[i];
      fragment = join(pattern, n, std::move(fragment), leaf_for(pattern, n, context, query_peer), query_peer);
    }
    if (!whole)
      whole = std::move(fragment);
    else
      whole = join(pattern, sq.nodes.front(), std::move(whole), std::move(fragment), query_peer);
  }
  auto root = make(OpKind::recompose, query_peer, decomposition.return_nodes);
  root->children.push_back(std::move(whole));
  insert_ships(*root);
  return Plan(pattern, std::move(root));
}

void annotate(Plan& plan, const PostingStats& stats) {
  if (plan.root) annotate_node(plan.pattern, *plan.root, stats);
}

void reconcile_ships(PlanNode& root) {
  for (auto& c : root.children) strip_ships(c);
  insert_ships(root);
}

Rule join_site_push() {
  return {"JoinSitePush", [](const Plan& plan, std::size_t at) -> std::optional<Plan> {
            Plan out = plan;
            auto* slot = slot_at(out.root, at);
            if (!slot) return std::nullopt;
            auto& n = **slot;
            if (n.kind != OpKind::struct_join && n.kind != OpKind::intersect) return std::nullopt;
            const PlanNode* best = nullptr;
            for (const auto& c : n.children) {
              const auto& in = through_ship(*c);
              if (!best || in.est_bytes > best->est_bytes) best = &in;
            }
            if (!best || best->site == n.site) return std::nullopt;
            n.site = best->site;
            reconcile_ships(*out.root);
            return out;
          }};
}

Rule lookup_fusion() {
  return {"LookupFusion", [](const Plan& plan, std::size_t at) -> std::optional<Plan> {
            Plan out = plan;
            auto* slot = slot_at(out.root, at);
            if (!slot) return std::nullopt;
            auto& n = **slot;
            if (n.kind != OpKind::struct_join || n.children.size() != 2) return std::nullopt;
            const auto& a = n.children[0]->producer();
            const auto& b = n.children[1]->producer();
            if (!a.is_leaf() || a.kind != b.kind || a.dht != b.dht || a.site != b.site) return std::nullopt;
            if (a.key != b.key || a.tag != b.tag || a.lo != b.lo || a.hi != b.hi) return std::nullopt;
            auto fused = a.clone();
            fused->nodes = merged(a.nodes, b.nodes);
            for (const auto& [v, r] : b.est_rows) fused->est_rows[v] = r;
            n.children.clear();
            n.children.push_back(wrap_at(std::move(fused)));
            reconcile_ships(*out.root);
            return out;
          }};
}

Rule ship_collapse() {
  return {"ShipCollapse", [](const Plan& plan, std::size_t at) -> std::optional<Plan> {
            Plan out = plan;
            auto* slot = slot_at(out.root, at);
            if (!slot) return std::nullopt;
            auto& n = **slot;
            if (n.kind != OpKind::ship || n.children.size() != 1 || n.children[0]->kind != OpKind::ship ||
                n.children[0]->children.size() != 1)
              return std::nullopt;
            auto inner = std::move(n.children[0]->children[0]);
            n.children[0] = std::move(inner);
            return out;
          }};
}

Rule dead_op() {
  return {"DeadOp", [](const Plan& plan, std::size_t at) -> std::optional<Plan> {
            Plan out = plan;
            auto* slot = slot_at(out.root, at);
            if (!slot) return std::nullopt;
            auto& n = **slot;
            if (n.children.size() != 1) return std::nullopt;
            bool dead_ship = n.kind == OpKind::ship && n.children[0]->site == n.site;
            bool nested_at = n.kind == OpKind::at && n.children[0]->kind == OpKind::at && n.children[0]->site == n.site;
            if (!dead_ship && !nested_at) return std::nullopt;
            auto inner = std::move(n.children[0]);
            *slot = std::move(inner);
            return out;
          }};
}

std::vector<Rule> default_rules() { return {join_site_push(), lookup_fusion(), ship_collapse(), dead_op()}; }

Plan rewrite(const Plan& plan, const std::vector<Rule>& rules, std::size_t max_passes) {
  Plan current = plan;
  for (std::size_t pass = 0; pass < max_passes; ++pass) {
    auto base_cost = cost(current);
    auto base_size = current.size();
    std::optional<Plan> best;
    std::uint64_t best_cost = 0;
    for (const auto& rule : rules) {
      for (std::size_t at = 0; at < base_size; ++at) {
        auto candidate = rule.apply(current, at);
        if (!candidate) continue;
        auto c = cost(*candidate);
        bool improves = c < base_cost || (c == base_cost && candidate->size() < base_size);
        if (!improves) continue;
        if (!best || c < best_cost) {
          best_cost = c;
          best = std::move(candidate);
        }
      }
    }
    if (!best) break;
    current = std::move(*best);
  }
  return current;
}

Plan place(const Plan& plan, const PostingStats& stats, PeerId query_peer) {
  Plan placed = plan;
  if (!placed.root) return placed;
  strip_ships(placed.root);
  annotate(placed, stats);
  Plan central = placed;

  place_node(*placed.root, query_peer);
  insert_ships(*placed.root);

  all_at(*central.root, query_peer);
  insert_ships(*central.root);
  return cost(central) < cost(placed) ? central : placed;
}

}  // namespace wcstore::optimizer
