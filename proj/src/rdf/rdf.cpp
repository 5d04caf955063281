#include "wcstore/rdf/rdf.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

#include "wcstore/error.hpp"

namespace wcstore::rdf {

namespace {

std::vector<std::string_view> split_fields(std::string_view line, bool tabs) {
  std::vector<std::string_view> out;
  if (tabs) {
    std::size_t pos = 0;
    while (true) {
      auto next = line.find('\t', pos);
      out.push_back(line.substr(pos, next - pos));
      if (next == std::string_view::npos) break;
      pos = next + 1;
    }
    return out;
  }
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ')) ++pos;
    if (pos == line.size()) break;
    auto next = line.find(' ', pos);
    if (next == std::string_view::npos) next = line.size();
    out.push_back(line.substr(pos, next - pos));
    pos = next;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename F>
void for_each_line(std::string_view text, F&& f) {
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto next = text.find('\n', pos);
    if (next == std::string_view::npos) next = text.size();
    auto line = text.substr(pos, next - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    f(line, pos);
    pos = next + 1;
  }
}

Term term_from(std::string_view s) {
  if (!s.empty() && s.front() == '?') return {true, std::string(s.substr(1))};
  return {false, std::string(s)};
}

using Bindings = std::map<std::string, std::string>;

/// Bindings of one pattern's variables produced by triple `t`, if it matches.
bool match(const TriplePattern& p, const Triple& t, Bindings& out) {
  out.clear();
  auto bind = [&](const Term& term, const std::string& value) {
    if (!term.variable) return term.text == value;
    auto [it, fresh] = out.emplace(term.text, value);
    return fresh || it->second == value;
  };
  return bind(p.subject, t.subject) && bind(p.predicate, t.predicate) && bind(p.object, t.object);
}

std::vector<std::string> variables_of(const TriplePattern& p) {
  std::vector<std::string> out;
  for (const auto* t : {&p.subject, &p.predicate, &p.object})
    if (t->variable && std::find(out.begin(), out.end(), t->text) == out.end()) out.push_back(t->text);
  return out;
}

}  // namespace

std::string to_text(const Triple& t) { return t.subject + '\t' + t.predicate + '\t' + t.object; }

Triple triple_from_text(std::string_view text) {
  auto f = split_fields(text, true);
  if (f.size() != 3 || f[0].empty() || f[1].empty() || f[2].empty())
    throw Error(Errc::invalid_argument, "not a triple: '" + std::string(text) + "'");
  return {std::string(f[0]), std::string(f[1]), std::string(f[2])};
}

std::vector<Triple> parse_triples(std::string_view text) {
  std::vector<Triple> out;
  for_each_line(text, [&](std::string_view line, std::size_t offset) {
    auto t = trim(line);
    if (t.empty() || t[0] == '#') return;
    auto f = split_fields(line, true);
    if (f.size() != 3) throw SyntaxError(offset, "expected 3 tab-separated fields, got " + std::to_string(f.size()));
    for (auto field : f)
      if (field.empty()) throw SyntaxError(offset, "empty triple field");
    out.push_back({std::string(f[0]), std::string(f[1]), std::string(f[2])});
  });
  return out;
}

void ConjunctiveQuery::validate() const {
  if (patterns.empty()) throw Error(Errc::invalid_argument, "query has no triple patterns");
  for (const auto& v : projection) {
    bool found = std::any_of(patterns.begin(), patterns.end(), [&](const TriplePattern& p) {
      auto vars = variables_of(p);
      return std::find(vars.begin(), vars.end(), v) != vars.end();
    });
    if (!found) throw Error(Errc::invalid_argument, "projected variable ?" + v + " occurs in no pattern");
  }
}

ConjunctiveQuery parse_query(std::string_view text) {
  ConjunctiveQuery q;
  bool header = false;
  for_each_line(text, [&](std::string_view raw, std::size_t offset) {
    auto line = trim(raw);
    if (line.empty() || line[0] == '#') return;
    if (!header) {
      auto f = split_fields(line, false);
      if (f.empty() || f[0] != "SELECT") throw SyntaxError(offset, "query must start with SELECT");
      for (std::size_t i = 1; i < f.size(); ++i) {
        if (f[i].size() < 2 || f[i][0] != '?') throw SyntaxError(offset, "SELECT lists ?variables only");
        q.projection.emplace_back(f[i].substr(1));
      }
      if (q.projection.empty()) throw SyntaxError(offset, "SELECT needs at least one variable");
      header = true;
      return;
    }
    auto f = split_fields(line, line.find('\t') != std::string_view::npos);
    if (f.size() != 3) throw SyntaxError(offset, "triple pattern needs 3 terms, got " + std::to_string(f.size()));
    for (auto t : f)
      if (t.empty() || t == "?") throw SyntaxError(offset, "empty term in triple pattern");
    q.patterns.push_back({term_from(f[0]), term_from(f[1]), term_from(f[2])});
  });
  if (!header) throw SyntaxError(0, "empty query");
  try {
    q.validate();
  } catch (const Error& e) {
    throw SyntaxError(0, e.what());
  }
  return q;
}

std::string subject_key(std::string_view s) { return "s:" + std::string(s); }
std::string predicate_key(std::string_view p) { return "p:" + std::string(p); }
std::string object_key(std::string_view o) { return "o:" + std::string(o); }

std::vector<Row> eval_conjunctive(const ConjunctiveQuery& query, const TripleLookup& lookup) {
  query.validate();
  std::vector<Bindings> table{Bindings{}};
  std::set<std::string> bound;
  for (const auto& p : query.patterns) {
    std::vector<std::string> keys;
    if (!p.subject.variable) keys.push_back(subject_key(p.subject.text));
    if (!p.predicate.variable) keys.push_back(predicate_key(p.predicate.text));
    if (!p.object.variable) keys.push_back(object_key(p.object.text));
    if (keys.empty()) throw Error(Errc::unseedable_pattern, "triple pattern has no constant to look up");
    auto seed = keys.front();
    auto best = lookup.count(seed);
    for (std::size_t i = 1; i < keys.size(); ++i) {
      auto c = lookup.count(keys[i]);
      if (c < best) best = c, seed = keys[i];
    }
    std::vector<Bindings> matches;
    Bindings b;
    for (const auto& t : lookup.fetch(seed))
      if (match(p, t, b)) matches.push_back(b);

    auto vars = variables_of(p);
    std::vector<std::string> shared;
    for (const auto& v : vars)
      if (bound.contains(v)) shared.push_back(v);
    auto join_key = [&](const Bindings& row) {
      std::string k;
      for (const auto& v : shared) k += row.at(v) + '\x1f';
      return k;
    };
    std::unordered_map<std::string, std::vector<const Bindings*>> buckets;
    for (const auto& m : matches) buckets[join_key(m)].push_back(&m);
    std::vector<Bindings> next;
    for (const auto& row : table) {
      auto it = buckets.find(join_key(row));
      if (it == buckets.end()) continue;
      for (const auto* m : it->second) {
        Bindings merged = row;
        merged.insert(m->begin(), m->end());
        next.push_back(std::move(merged));
      }
    }
    table = std::move(next);
    bound.insert(vars.begin(), vars.end());
    if (table.empty()) break;
  }
  std::set<Row> rows;
  for (const auto& b : table) {
    Row r;
    for (const auto& v : query.projection) r.push_back(b.at(v));
    rows.insert(std::move(r));
  }
  return {rows.begin(), rows.end()};
}

std::size_t LocalTripleStore::index_triples(const std::vector<Triple>& triples) {
  for (const auto& t : triples) {
    auto i = triples_.size();
    triples_.push_back(t);
    by_key_[subject_key(t.subject)].push_back(i);
    by_key_[predicate_key(t.predicate)].push_back(i);
    by_key_[object_key(t.object)].push_back(i);
  }
  return 3 * triples.size();
}

TripleLookup LocalTripleStore::lookup() const {
  return {[this](const std::string& key) -> std::uint64_t {
            auto it = by_key_.find(key);
            return it == by_key_.end() ? 0 : it->second.size();
          },
          [this](const std::string& key) {
            std::vector<Triple> out;
            if (auto it = by_key_.find(key); it != by_key_.end())
              for (auto i : it->second) out.push_back(triples_[i]);
            return out;
          }};
}

std::size_t DhtTripleStore::index_triples(const std::vector<Triple>& triples, net::PeerId via) {
  if (overlay_.empty()) throw Error(Errc::no_members, "triple overlay has no members");
  std::size_t puts = 0;
  for (const auto& t : triples) {
    auto value = to_bytes(to_text(t));
    for (const auto& key : {subject_key(t.subject), predicate_key(t.predicate), object_key(t.object)}) {
      overlay_.put(via, key, value);
      ++catalog_[key];
      ++puts;
    }
  }
  return puts;
}

std::vector<Triple> DhtTripleStore::get(std::string_view key, net::PeerId via) {
  std::vector<Triple> out;
  for (const auto& v : overlay_.get(via, key)) out.push_back(triple_from_text(to_string(v)));
  return out;
}

TripleLookup DhtTripleStore::lookup(net::PeerId via) {
  return {[this](const std::string& key) -> std::uint64_t {
            auto it = catalog_.find(key);
            return it == catalog_.end() ? 0 : it->second;
          },
          [this, via](const std::string& key) { return get(key, via); }};
}

std::vector<Row> DhtTripleStore::eval(const ConjunctiveQuery& query, net::PeerId via) {
  return eval_conjunctive(query, lookup(via));
}

}  // namespace wcstore::rdf
