#include "wcstore/error.hpp"

namespace wcstore {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::malformed_xml: return "MalformedXml";
    case Errc::empty_input: return "EmptyInput";
    case Errc::unknown_node: return "UnknownNode";
    case Errc::duplicate_peer: return "DuplicatePeer";
    case Errc::unknown_peer: return "UnknownPeer";
    case Errc::tick_budget_exceeded: return "TickBudgetExceeded";
    case Errc::already_member: return "AlreadyMember";
    case Errc::not_member: return "NotMember";
    case Errc::no_members: return "NoMembers";
    case Errc::not_range_capable: return "NotRangeCapable";
    case Errc::range_exhausted: return "RangeExhausted";
    case Errc::syntax_error: return "SyntaxError";
    case Errc::unsupported_wildcard_root: return "UnsupportedWildcardRoot";
    case Errc::unseedable_pattern: return "UnseedablePattern";
    case Errc::plan_site_unreachable: return "PlanSiteUnreachable";
    case Errc::malformed_plan: return "MalformedPlan";
    case Errc::not_found: return "NotFound";
    case Errc::io_failure: return "IoFailure";
    case Errc::corrupt_snapshot: return "CorruptSnapshot";
    case Errc::invalid_config: return "InvalidConfig";
    case Errc::invalid_argument: return "InvalidArgument";
  }
  return "Unknown";
}

bool is_user_error(Errc code) {
  switch (code) {
    case Errc::malformed_xml:
    case Errc::empty_input:
    case Errc::unknown_node:
    case Errc::syntax_error:
    case Errc::unsupported_wildcard_root:
    case Errc::unseedable_pattern:
    case Errc::not_found:
    case Errc::corrupt_snapshot:
    case Errc::invalid_config:
    case Errc::invalid_argument:
    case Errc::io_failure:
    case Errc::not_range_capable:
      return true;
    default:
      return false;
  }
}

}  // namespace wcstore
