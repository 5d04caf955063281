#pragma once

#include <vector>

#include "wcstore/tpq/pattern.hpp"

namespace wcstore::tpq {

/// Exhaustive backtracking over every document node for every pattern node,
/// checking axes with is_parent / is_ancestor only. Ground truth for the
/// index-driven evaluators. Result is in canonical order.
std::vector<Binding> eval_naive(const TreePattern& pattern, const std::vector<xml::Document>& docs);

}  // namespace wcstore::tpq
