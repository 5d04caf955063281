#include "wcstore/optimizer/plan.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "wcstore/error.hpp"
#include "wcstore/xml/document.hpp"

namespace wcstore::optimizer {

namespace {

constexpr std::string_view kOpNames[] = {"IndexLookup", "RangeLookup", "Intersect", "StructJoin",
                                         "Ship",        "At",          "Recompose"};

[[noreturn]] void malformed(const std::string& what) { throw Error(Errc::malformed_plan, what); }

std::string escape_attr(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string join_nodes(const std::vector<std::size_t>& nodes) {
  std::string out;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(nodes[i]);
  }
  return out;
}

std::string join_rows(const std::map<std::size_t, std::uint64_t>& rows) {
  std::string out;
  for (const auto& [n, r] : rows) {
    if (!out.empty()) out += ',';
    out += std::to_string(n) + ':' + std::to_string(r);
  }
  return out;
}

void write_node(std::ostringstream& out, const PlanNode& n) {
  auto attr = [&](std::string_view name, const std::string& value) {
    out << ' ' << name << "=\"" << escape_attr(value) << '"';
  };
  out << '<' << to_string(n.kind);
  attr("site", std::to_string(n.site.value));
  if (n.is_leaf()) attr("dht", std::to_string(n.dht.value));
  if (n.kind == OpKind::index_lookup) attr("key", n.key);
  if (n.kind == OpKind::range_lookup) {
    attr("tag", n.tag);
    attr("lo", std::to_string(n.lo));
    attr("hi", std::to_string(n.hi));
  }
  attr("nodes", join_nodes(n.nodes));
  if (n.kind == OpKind::struct_join) {
    attr("parent", std::to_string(n.parent_node));
    attr("child", std::to_string(n.child_node));
    attr("axis", n.axis == tpq::Axis::child ? "child" : "descendant");
  }
  attr("rows", join_rows(n.est_rows));
  attr("est", std::to_string(n.est_bytes));
  if (n.children.empty()) {
    out << "/>";
    return;
  }
  out << '>';
  for (const auto& c : n.children) write_node(out, *c);
  out << "</" << to_string(n.kind) << '>';
}

template <typename T>
T parse_number(std::string_view text, std::string_view what) {
  T v{};
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size())
    malformed("bad number in attribute " + std::string(what) + ": '" + std::string(text) + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  if (s.empty()) return out;
  std::size_t pos = 0;
  while (true) {
    auto next = s.find(sep, pos);
    out.push_back(s.substr(pos, next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

struct Attrs {
  std::map<std::string, std::string> values;

  const std::string* find(const std::string& name) const {
    auto it = values.find(name);
    return it == values.end() ? nullptr : &it->second;
  }
  const std::string& need(const std::string& name, std::string_view op) const {
    auto* v = find(name);
    if (!v) malformed(std::string(op) + " is missing attribute " + name);
    return *v;
  }
};

std::unique_ptr<PlanNode> read_node(const xml::Document& doc, xml::NodeId id) {
  const auto& el = doc.node(id);
  auto kind = op_kind_from(el.name);
  if (!kind) malformed("unknown operator <" + el.name + ">");
  Attrs attrs;
  std::vector<xml::NodeId> inputs;
  for (auto c : el.children) {
    const auto& child = doc.node(c);
    if (child.kind == xml::NodeKind::attribute)
      attrs.values[child.name.substr(1)] = child.value;
    else if (child.kind == xml::NodeKind::element)
      inputs.push_back(c);
    else
      malformed("unexpected text inside <" + el.name + ">");
  }
  auto node = std::make_unique<PlanNode>();
  node->kind = *kind;
  node->site = PeerId{parse_number<std::uint64_t>(attrs.need("site", el.name), "site")};
  if (node->is_leaf()) node->dht = DhtId{parse_number<std::uint32_t>(attrs.need("dht", el.name), "dht")};
  if (*kind == OpKind::index_lookup) node->key = attrs.need("key", el.name);
  if (*kind == OpKind::range_lookup) {
    node->tag = attrs.need("tag", el.name);
    node->lo = parse_number<std::int64_t>(attrs.need("lo", el.name), "lo");
    node->hi = parse_number<std::int64_t>(attrs.need("hi", el.name), "hi");
  }
  for (auto part : split(attrs.need("nodes", el.name), ','))
    node->nodes.push_back(parse_number<std::size_t>(part, "nodes"));
  if (*kind == OpKind::struct_join) {
    node->parent_node = parse_number<std::size_t>(attrs.need("parent", el.name), "parent");
    node->child_node = parse_number<std::size_t>(attrs.need("child", el.name), "child");
    const auto& axis = attrs.need("axis", el.name);
    if (axis == "child")
      node->axis = tpq::Axis::child;
    else if (axis == "descendant")
      node->axis = tpq::Axis::descendant;
    else
      malformed("bad axis '" + axis + "'");
  }
  if (auto* rows = attrs.find("rows")) {
    for (auto part : split(*rows, ',')) {
      auto colon = part.find(':');
      if (colon == std::string_view::npos) malformed("bad rows entry '" + std::string(part) + "'");
      node->est_rows[parse_number<std::size_t>(part.substr(0, colon), "rows")] =
          parse_number<std::uint64_t>(part.substr(colon + 1), "rows");
    }
  }
  if (auto* est = attrs.find("est")) node->est_bytes = parse_number<std::uint64_t>(*est, "est");
  for (auto c : inputs) node->children.push_back(read_node(doc, c));
  return node;
}

void collect(const PlanNode& n, std::vector<const PlanNode*>& out) {
  out.push_back(&n);
  for (const auto& c : n.children) collect(*c, out);
}

void collect(PlanNode& n, std::vector<PlanNode*>& out) {
  out.push_back(&n);
  for (auto& c : n.children) collect(*c, out);
}

}  // namespace

std::string_view to_string(OpKind kind) { return kOpNames[static_cast<int>(kind)]; }

std::optional<OpKind> op_kind_from(std::string_view name) {
  for (std::size_t i = 0; i < std::size(kOpNames); ++i)
    if (kOpNames[i] == name) return static_cast<OpKind>(i);
  return std::nullopt;
}

std::unique_ptr<PlanNode> PlanNode::clone() const {
  auto copy = std::make_unique<PlanNode>();
  copy->kind = kind;
  copy->site = site;
  copy->dht = dht;
  copy->key = key;
  copy->tag = tag;
  copy->lo = lo;
  copy->hi = hi;
  copy->nodes = nodes;
  copy->parent_node = parent_node;
  copy->child_node = child_node;
  copy->axis = axis;
  copy->est_rows = est_rows;
  copy->est_bytes = est_bytes;
  for (const auto& c : children) copy->children.push_back(c->clone());
  return copy;
}

bool PlanNode::single_list() const {
  const auto& p = producer();
  return p.is_leaf() || p.kind == OpKind::intersect;
}

const PlanNode& PlanNode::producer() const {
  const PlanNode* n = this;
  while ((n->kind == OpKind::ship || n->kind == OpKind::at) && n->children.size() == 1) n = n->children[0].get();
  return *n;
}

Plan::Plan(const Plan& other) : pattern(other.pattern), root(other.root ? other.root->clone() : nullptr) {}

Plan& Plan::operator=(const Plan& other) {
  if (this != &other) {
    pattern = other.pattern;
    root = other.root ? other.root->clone() : nullptr;
  }
  return *this;
}

std::size_t Plan::size() const { return root ? preorder(*root).size() : 0; }

std::vector<const PlanNode*> preorder(const PlanNode& root) {
  std::vector<const PlanNode*> out;
  collect(root, out);
  return out;
}

std::vector<PlanNode*> preorder(PlanNode& root) {
  std::vector<PlanNode*> out;
  collect(root, out);
  return out;
}

std::uint64_t cost(const Plan& plan) {
  if (!plan.root) return 0;
  std::uint64_t total = 0;
  for (const auto* n : preorder(*plan.root))
    if (n->kind == OpKind::ship && !n->children.empty() && n->children[0]->site != n->site)
      total += n->children[0]->est_bytes;
  return total;
}

std::string to_document(const Plan& plan) {
  std::ostringstream out;
  out << "<Plan pattern=\"" << escape_attr(tpq::to_string(plan.pattern)) << "\">";
  if (plan.root) write_node(out, *plan.root);
  out << "</Plan>";
  return out.str();
}

Plan from_document(std::string_view text) {
  xml::Document doc;
  try {
    doc = xml::parse_document(text, 1);
  } catch (const Error& e) {
    malformed(std::string("plan document is not well-formed: ") + e.what());
  }
  const auto& top = doc.node(doc.root());
  if (top.name != "Plan") malformed("plan document root must be <Plan>");
  Plan plan;
  std::optional<xml::NodeId> body;
  for (auto c : top.children) {
    const auto& child = doc.node(c);
    if (child.kind == xml::NodeKind::attribute && child.name == "@pattern") {
      try {
        plan.pattern = tpq::parse_pattern(child.value);
      } catch (const SyntaxError& e) {
        malformed(std::string("plan pattern does not parse: ") + e.what());
      }
    } else if (child.kind == xml::NodeKind::element) {
      if (body) malformed("<Plan> must hold a single operator tree");
      body = c;
    }
  }
  if (plan.pattern.size() == 0) malformed("<Plan> is missing its pattern");
  if (body) plan.root = read_node(doc, *body);
  check_well_formed(plan);
  return plan;
}

void check_well_formed(const Plan& plan) {
  if (!plan.root) malformed("plan has no operators");
  auto n_nodes = plan.pattern.size();
  for (const auto* n : preorder(*plan.root)) {
    auto name = std::string(to_string(n->kind));
    for (auto v : n->nodes)
      if (v >= n_nodes) malformed(name + " names pattern node " + std::to_string(v) + " outside the pattern");
    std::size_t want_min = 1, want_max = 1;
    switch (n->kind) {
      case OpKind::index_lookup:
      case OpKind::range_lookup: want_min = want_max = 0; break;
      case OpKind::intersect: want_min = want_max = 2; break;
      case OpKind::struct_join: want_min = 1, want_max = 2; break;
      default: break;
    }
    if (n->children.size() < want_min || n->children.size() > want_max)
      malformed(name + " has " + std::to_string(n->children.size()) + " inputs");
    if (n->kind == OpKind::recompose && n != plan.root.get()) malformed("Recompose must be the plan root");
    if (n->kind == OpKind::range_lookup && n->lo > n->hi) malformed("RangeLookup with lo > hi");
    if (n->kind == OpKind::struct_join) {
      auto pn = n->parent_node, cn = n->child_node;
      if (cn >= n_nodes || pn >= n_nodes || plan.pattern.node(cn).parent != pn)
        malformed("StructJoin edge " + std::to_string(pn) + "-" + std::to_string(cn) + " is not a pattern edge");
    }
    for (const auto& c : n->children) {
      if (n->kind == OpKind::ship) continue;
      if (c->site != n->site)
        malformed(name + " at peer " + std::to_string(n->site.value) + " reads an input located at peer " +
                  std::to_string(c->site.value));
    }
  }
}

}  // namespace wcstore::optimizer
