#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "wcstore/dht/overlay.hpp"

namespace wcstore::rdf {

struct Triple {
  std::string subject;
  std::string predicate;
  std::string object;

  auto operator<=>(const Triple&) const = default;
};

/// "subject\tpredicate\tobject"
std::string to_text(const Triple& t);
/// Inverse of to_text; throws invalid_argument.
Triple triple_from_text(std::string_view text);

/// One triple per line, three tab-separated nonempty fields. Blank lines
/// and lines starting with "#" are skipped. Throws SyntaxError at the
/// offending line's offset.
std::vector<Triple> parse_triples(std::string_view text);

struct Term {
  bool variable = false;
  std::string text;  ///< variable name without "?", or the constant

  bool operator==(const Term&) const = default;
};

struct TriplePattern {
  Term subject;
  Term predicate;
  Term object;

  bool operator==(const TriplePattern&) const = default;
};

struct ConjunctiveQuery {
  std::vector<TriplePattern> patterns;
  std::vector<std::string> projection;

  /// Throws invalid_argument when a projected variable occurs in no pattern.
  void validate() const;
};

/// "SELECT ?x ?y" header, then one pattern per line. Terms are separated by
/// tabs when the line has any, otherwise by spaces. "#" starts a comment line.
ConjunctiveQuery parse_query(std::string_view text);

/// Values of the projected variables, in projection order.
using Row = std::vector<std::string>;

std::string subject_key(std::string_view s);
std::string predicate_key(std::string_view p);
std::string object_key(std::string_view o);

/// Key-based access to an indexed triple set.
struct TripleLookup {
  std::function<std::uint64_t(const std::string&)> count;
  std::function<std::vector<Triple>(const std::string&)> fetch;
};

/// Seeds each pattern from its most selective constant (fewest triples;
/// ties: subject, predicate, object), then hash-joins on shared variables.
/// Returns distinct rows in sorted order. Throws UnseedablePattern for a
/// pattern made only of variables.
std::vector<Row> eval_conjunctive(const ConjunctiveQuery& query, const TripleLookup& lookup);

/// Triples kept in local maps.
class LocalTripleStore {
 public:
  std::size_t index_triples(const std::vector<Triple>& triples);
  TripleLookup lookup() const;
  const std::vector<Triple>& triples() const { return triples_; }

 private:
  std::vector<Triple> triples_;
  std::map<std::string, std::vector<std::size_t>> by_key_;
};

/// Triples published into a hash overlay under their s:, p: and o: keys.
class DhtTripleStore {
 public:
  explicit DhtTripleStore(dht::Overlay& overlay) : overlay_(overlay) {}

  /// Returns the number of puts (three per triple).
  std::size_t index_triples(const std::vector<Triple>& triples, net::PeerId via);
  std::vector<Row> eval(const ConjunctiveQuery& query, net::PeerId via);
  TripleLookup lookup(net::PeerId via);
  std::vector<Triple> get(std::string_view key, net::PeerId via);

  const std::map<std::string, std::uint64_t>& catalog() const { return catalog_; }

 private:
  dht::Overlay& overlay_;
  std::map<std::string, std::uint64_t> catalog_;
};

}  // namespace wcstore::rdf
