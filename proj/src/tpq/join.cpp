#include "wcstore/tpq/join.hpp"

#include <algorithm>

#include "wcstore/error.hpp"

namespace wcstore::tpq {

namespace {

bool before(const xml::StructuralId& a, const xml::StructuralId& b) {
  return a.doc_id != b.doc_id ? a.doc_id < b.doc_id : a.start < b.start;
}

bool encloses(const xml::StructuralId& outer, const xml::StructuralId& inner) {
  return outer.doc_id == inner.doc_id && inner.start < outer.end;
}

template <class Keep>
void filter_by_index(PostingList& list, const Keep& keep) {
  std::size_t w = 0;
  for (std::size_t r = 0; r < list.size(); ++r)
    if (keep[r]) list[w++] = list[r];
  list.resize(w);
}

}  // namespace

std::vector<std::pair<std::size_t, std::size_t>> structural_join(const PostingList& upper,
                                                                 const PostingList& lower, Axis axis) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::vector<std::size_t> stack;
  std::size_t i = 0;
  for (std::size_t j = 0; j < lower.size(); ++j) {
    const auto& d = lower[j];
    while (i < upper.size() && before(upper[i], d)) {
      const auto& a = upper[i];
      while (!stack.empty() && !encloses(upper[stack.back()], a)) stack.pop_back();
      stack.push_back(i);
      ++i;
    }
    while (!stack.empty() && !encloses(upper[stack.back()], d)) stack.pop_back();
    if (axis == Axis::child) {
      // Only the innermost enclosing entries can be the parent.
      for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
        const auto& a = upper[*it];
        if (a.depth + 1 == d.depth && xml::is_parent(a, d)) out.emplace_back(*it, j);
        if (a.depth + 1 < d.depth) break;
      }
    } else {
      for (auto s : stack)
        if (xml::is_ancestor(upper[s], d)) out.emplace_back(s, j);
    }
  }
  return out;
}

void reduce(const TreePattern& pattern, NodeLists& lists) {
  for (auto& [n, list] : lists) {
    index::normalize(list);
    // Attribute labels are the only ones with start == end among postings.
    bool attribute = pattern.node(n).is_attribute();
    std::erase_if(list, [&](const xml::StructuralId& s) { return (s.start == s.end) != attribute; });
  }
  if (auto it = lists.find(pattern.root()); it != lists.end() && pattern.node(pattern.root()).axis == Axis::child)
    std::erase_if(it->second, [](const xml::StructuralId& s) { return s.depth != 1; });

  std::vector<std::size_t> edges;  // child ends of present edges, preorder
  for (const auto& [n, list] : lists) {
    const auto& pn = pattern.node(n);
    if (pn.parent && lists.contains(*pn.parent)) edges.push_back(n);
  }
  // Bottom-up: a parent posting survives only with a partner in each child.
  for (auto e = edges.rbegin(); e != edges.rend(); ++e) {
    auto& up = lists[*pattern.node(*e).parent];
    auto& down = lists[*e];
    std::vector<char> keep(up.size(), 0);
    for (auto [a, d] : structural_join(up, down, pattern.node(*e).axis)) keep[a] = 1;
    filter_by_index(up, keep);
  }
  // Top-down: a child posting survives only with a partner in its parent.
  for (auto e : edges) {
    auto& up = lists[*pattern.node(e).parent];
    auto& down = lists[e];
    std::vector<char> keep(down.size(), 0);
    for (auto [a, d] : structural_join(up, down, pattern.node(e).axis)) keep[d] = 1;
    filter_by_index(down, keep);
  }
}

std::vector<Binding> enumerate_bindings(const TreePattern& pattern, NodeLists lists) {
  for (std::size_t n = 0; n < pattern.size(); ++n)
    if (!lists.contains(n)) throw Error(Errc::invalid_argument, "no candidates for pattern node " + std::to_string(n));
  reduce(pattern, lists);

  // partners[n][i]: indices into lists[n] matching posting i of n's parent.
  std::vector<std::vector<std::vector<std::size_t>>> partners(pattern.size());
  for (std::size_t n = 1; n < pattern.size(); ++n) {
    auto p = *pattern.node(n).parent;
    partners[n].resize(lists[p].size());
    for (auto [a, d] : structural_join(lists[p], lists[n], pattern.node(n).axis)) partners[n][a].push_back(d);
  }

  std::vector<Binding> out;
  std::vector<std::size_t> chosen(pattern.size());
  Binding current(pattern.size());
  auto extend = [&](auto& self, std::size_t n) -> void {
    if (n == pattern.size()) {
      out.push_back(current);
      return;
    }
    const auto& candidates = partners[n][chosen[*pattern.node(n).parent]];
    for (auto c : candidates) {
      chosen[n] = c;
      current[n] = lists[n][c];
      self(self, n + 1);
    }
  };
  const auto& roots = lists[pattern.root()];
  for (std::size_t r = 0; r < roots.size(); ++r) {
    chosen[0] = r;
    current[0] = roots[r];
    extend(extend, 1);
  }
  sort_canonical(pattern, out);
  return out;
}

}  // namespace wcstore::tpq
