#pragma once

#include <string>
#include <vector>

#include "wcstore/index/index.hpp"
#include "wcstore/net/network.hpp"
#include "wcstore/optimizer/plan.hpp"
#include "wcstore/tpq/join.hpp"
#include "wcstore/xml/document.hpp"

namespace wcstore::optimizer {

inline constexpr net::Channel kShipChannel = 0x200;
inline constexpr net::Channel kFetchChannel = 0x201;
inline constexpr net::Channel kFetchReplyChannel = 0x202;

/// Serves resource payloads from the peer holding each document.
class ResourceHost {
 public:
  virtual ~ResourceHost() = default;
  virtual PeerId home_of(std::uint64_t doc_id) const = 0;
  /// Called on the home peer. Throws NotFound for an unknown label.
  virtual std::string serialize(const xml::StructuralId& label) const = 0;
};

struct ExecutionResult {
  /// Output of the root operator.
  tpq::NodeLists lists;
  /// Filled when the root is Recompose.
  std::vector<tpq::Binding> bindings;
  /// Distinct return-node labels in (doc, start) order, serialized by their
  /// home peers. Empty without a ResourceHost.
  std::vector<xml::Resource> resources;
  net::NetworkStats stats;
};

/// Interprets plans over the simulated network. Lookups run at their site
/// through the overlays, Ship moves an operator's output between peers, and
/// Recompose joins the shipped lists at the query peer and fetches payloads.
class PlanExecutor {
 public:
  PlanExecutor(net::Network& net, index::Index& index, const ResourceHost* host = nullptr)
      : net_(net), index_(index), host_(host) {}

  /// Throws PlanSiteUnreachable when an operator's site is not a live peer
  /// and MalformedPlan when the plan cannot be interpreted.
  ExecutionResult execute(const Plan& plan, PeerId via);

 private:
  tpq::NodeLists eval(const Plan& plan, const PlanNode& n, ExecutionResult& result);
  tpq::NodeLists ship(const PlanNode& n, tpq::NodeLists lists);
  std::vector<xml::Resource> fetch(const std::vector<xml::StructuralId>& labels, PeerId via);

  net::Network& net_;
  index::Index& index_;
  const ResourceHost* host_;
};

/// Encoding used by Ship: a single list is the bare postings; several lists
/// are a u32 count plus postings each, in node order, and nothing at all
/// when every list is empty.
Bytes encode_output(const tpq::NodeLists& lists, const std::vector<std::size_t>& nodes, bool single_list);
tpq::NodeLists decode_output(std::span<const std::uint8_t> data, const std::vector<std::size_t>& nodes,
                             bool single_list);

}  // namespace wcstore::optimizer
