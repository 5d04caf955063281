#include "wcstore/tpq/naive.hpp"

namespace wcstore::tpq {

namespace {

void extend(const TreePattern& p, const xml::Document& doc, std::size_t next, Binding& current,
            std::vector<Binding>& out) {
  if (next == p.size()) {
    out.push_back(current);
    return;
  }
  const auto& pn = p.node(next);
  for (xml::NodeId id = 0; id < doc.size(); ++id) {
    if (!node_test(pn, doc, id)) continue;
    const auto& label = doc.node(id).label;
    bool ok;
    if (pn.parent) {
      const auto& up = current[*pn.parent];
      ok = pn.axis == Axis::child ? xml::is_parent(up, label) : xml::is_ancestor(up, label);
    } else {
      ok = pn.axis == Axis::descendant || label.depth == 1;
    }
    if (!ok) continue;
    current[next] = label;
    extend(p, doc, next + 1, current, out);
  }
}

}  // namespace

std::vector<Binding> eval_naive(const TreePattern& pattern, const std::vector<xml::Document>& docs) {
  pattern.validate();
  std::vector<Binding> out;
  Binding current(pattern.size());
  for (const auto& doc : docs) extend(pattern, doc, 0, current, out);
  sort_canonical(pattern, out);
  return out;
}

}  // namespace wcstore::tpq
