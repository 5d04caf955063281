#pragma once

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "wcstore/rdf/rdf.hpp"

namespace wcstore::gen {

/// Tries every combination of triples, one per pattern.
inline std::vector<rdf::Row> nested_loop(const std::vector<rdf::Triple>& triples, const rdf::ConjunctiveQuery& q) {
  std::set<rdf::Row> rows;
  std::map<std::string, std::string> env;
  std::function<void(std::size_t)> step = [&](std::size_t i) {
    if (i == q.patterns.size()) {
      rdf::Row r;
      for (const auto& v : q.projection) r.push_back(env.at(v));
      rows.insert(r);
      return;
    }
    const auto& p = q.patterns[i];
    for (const auto& t : triples) {
      auto saved = env;
      bool ok = true;
      for (auto [term, value] : {std::pair{&p.subject, &t.subject}, std::pair{&p.predicate, &t.predicate},
                                 std::pair{&p.object, &t.object}}) {
        if (!term->variable) {
          ok = ok && term->text == *value;
        } else {
          auto [it, fresh] = env.emplace(term->text, *value);
          ok = ok && (fresh || it->second == *value);
        }
      }
      if (ok) step(i + 1);
      env = saved;
    }
  };
  step(0);
  return {rows.begin(), rows.end()};
}

}  // namespace wcstore::gen
