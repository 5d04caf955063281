#pragma once

#include <cstddef>
#include <map>
#include <utility>
#include <vector>

#include "wcstore/index/index.hpp"
#include "wcstore/tpq/pattern.hpp"

namespace wcstore::tpq {

using index::PostingList;

/// Candidate postings per pattern node.
using NodeLists = std::map<std::size_t, PostingList>;

/// Stack-based structural join of two lists sorted by (doc_id, start):
/// index pairs (i, j) with upper[i] parent (child axis) or ancestor
/// (descendant axis) of lower[j]. One merge pass; the stack holds the chain
/// of nested upper intervals enclosing the current position.
std::vector<std::pair<std::size_t, std::size_t>> structural_join(const PostingList& upper,
                                                                 const PostingList& lower, Axis axis);

/// Normalizes every list, drops postings of the wrong node kind (element vs
/// attribute), applies the root's document-axis constraint, then
/// runs semi-join passes (bottom-up, then top-down) along every pattern edge
/// whose two ends are both present. Afterwards each remaining posting takes
/// part in at least one match of its connected fragment.
void reduce(const TreePattern& pattern, NodeLists& lists);

/// All bindings of the full pattern; `lists` must hold every node.
/// Result is in canonical order.
std::vector<Binding> enumerate_bindings(const TreePattern& pattern, NodeLists lists);

}  // namespace wcstore::tpq
