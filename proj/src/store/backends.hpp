#pragma once

#include <memory>

#include "wcstore/store/store.hpp"

namespace wcstore::store {

std::unique_ptr<Store> make_centralized(const StoreConfig& config);
std::unique_ptr<Store> make_p2p(const StoreConfig& config);

/// Distinct return-node labels of `bindings`, in (doc, start) order.
std::vector<xml::StructuralId> returned_labels(const tpq::TreePattern& pattern,
                                               const std::vector<tpq::Binding>& bindings);

}  // namespace wcstore::store
