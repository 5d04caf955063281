#include "wcstore/tpq/pattern.hpp"

#include <algorithm>
#include <charconv>

#include "wcstore/error.hpp"

namespace wcstore::tpq {

std::string_view to_string(Axis axis) { return axis == Axis::child ? "/" : "//"; }

std::size_t TreePattern::add_node(std::string label, std::optional<std::size_t> parent, Axis axis) {
  if (parent && *parent >= nodes_.size()) throw Error(Errc::invalid_argument, "unknown parent node");
  if (!parent && !nodes_.empty()) throw Error(Errc::invalid_argument, "pattern already has a root");
  PatternNode n;
  n.label = std::move(label);
  n.parent = parent;
  n.axis = axis;
  auto id = nodes_.size();
  nodes_.push_back(std::move(n));
  if (parent) nodes_[*parent].children.push_back(id);
  return id;
}

std::vector<std::size_t> TreePattern::return_nodes() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (nodes_[i].returned) out.push_back(i);
  return out;
}

void TreePattern::validate() const {
  if (nodes_.empty()) throw Error(Errc::invalid_argument, "empty pattern");
  if (nodes_[0].parent) throw Error(Errc::invalid_argument, "root has a parent");
  bool any_returned = false;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    if (n.label.empty()) throw Error(Errc::invalid_argument, "empty node label");
    if (i > 0 && (!n.parent || *n.parent >= i)) throw Error(Errc::invalid_argument, "nodes not in preorder");
    any_returned = any_returned || n.returned;
  }
  if (!any_returned) throw Error(Errc::invalid_argument, "pattern returns nothing");
}

namespace {

bool is_word_byte(char c) {
  auto u = static_cast<unsigned char>(c);
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || u >= 0x80;
}

bool is_label_start(char c) {
  auto u = static_cast<unsigned char>(c);
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_' || c == ':' || u >= 0x80;
}

bool is_label_char(char c) {
  return is_label_start(c) || (c >= '0' && c <= '9') || c == '-' || c == '.';
}

class PatternParser {
 public:
  explicit PatternParser(std::string_view text) : in_(text) {}

  TreePattern run() {
    skip_space();
    if (at_end()) fail("empty pattern");
    parse_chain(std::nullopt);
    skip_space();
    if (!at_end()) fail(std::string("unexpected '") + peek() + "'");
    if (pattern_.return_nodes().empty()) pattern_.node(0).returned = true;
    return std::move(pattern_);
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw SyntaxError(pos_, what); }

  bool at_end() const { return pos_ >= in_.size(); }
  char peek() const { return in_[pos_]; }
  void skip_space() {
    while (!at_end() && (peek() == ' ' || peek() == '\t' || peek() == '\n' || peek() == '\r')) ++pos_;
  }

  void parse_chain(std::optional<std::size_t> parent) {
    if (parent && pattern_.node(*parent).is_attribute()) fail("attributes have no children");
    do {
      parent = parse_step(parent);
      skip_space();
    } while (!at_end() && peek() == '/');
  }

  std::size_t parse_step(std::optional<std::size_t> parent) {
    skip_space();
    if (at_end() || peek() != '/') fail("expected '/' or '//'");
    Axis axis = Axis::child;
    ++pos_;
    if (!at_end() && peek() == '/') {
      axis = Axis::descendant;
      ++pos_;
    }
    auto label = parse_label();
    auto id = pattern_.add_node(std::move(label), parent, axis);
    for (;;) {
      skip_space();
      if (at_end()) break;
      char c = peek();
      if (c == '[') {
        ++pos_;
        parse_chain(id);
        skip_space();
        if (at_end() || peek() != ']') fail("expected ']'");
        ++pos_;
      } else if (c == '=') {
        ++pos_;
        set_predicate(id, WordEquals{parse_word()});
      } else if (in_.substr(pos_, 2) == "in" && pos_ + 2 < in_.size() &&
                 !is_label_char(in_[pos_ + 2])) {
        pos_ += 2;
        auto lo = parse_int();
        skip_space();
        if (in_.substr(pos_, 2) != "..") fail("expected '..'");
        pos_ += 2;
        auto hi = parse_int();
        if (lo > hi) fail("empty integer range");
        set_predicate(id, IntRange{lo, hi});
      } else {
        break;
      }
    }
    skip_space();
    if (!at_end() && peek() == '!') {
      ++pos_;
      pattern_.node(id).returned = true;
    }
    return id;
  }

  void set_predicate(std::size_t id, ValuePredicate pred) {
    auto& n = pattern_.node(id);
    if (n.predicate) fail("at most one value predicate per node");
    n.predicate = std::move(pred);
  }

  std::string parse_label() {
    if (at_end()) fail("expected a name");
    if (peek() == '*') {
      ++pos_;
      return "*";
    }
    std::string label;
    if (peek() == '@') {
      label += '@';
      ++pos_;
    }
    if (at_end() || !is_label_start(peek())) fail("expected a name");
    while (!at_end() && is_label_char(peek())) label += in_[pos_++];
    return label;
  }

  std::string parse_word() {
    skip_space();
    if (at_end() || peek() != '"') fail("expected '\"'");
    ++pos_;
    std::string word;
    while (!at_end() && peek() != '"') {
      char c = in_[pos_];
      if (!is_word_byte(c)) fail("word predicate must be a single alphanumeric word");
      word += (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
      ++pos_;
    }
    if (at_end()) fail("unterminated word");
    ++pos_;
    if (word.empty()) fail("empty word");
    return word;
  }

  std::int64_t parse_int() {
    skip_space();
    auto begin = pos_;
    if (!at_end() && peek() == '-') ++pos_;
    while (!at_end() && peek() >= '0' && peek() <= '9') ++pos_;
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(in_.data() + begin, in_.data() + pos_, v);
    if (begin == pos_ || ec != std::errc() || p != in_.data() + pos_) {
      pos_ = begin;
      fail("expected an integer");
    }
    return v;
  }

  std::string_view in_;
  std::size_t pos_ = 0;
  TreePattern pattern_;
};

void write_node(const TreePattern& p, std::size_t i, std::string& out) {
  const auto& n = p.node(i);
  out += to_string(n.axis);
  out += n.label;
  if (n.predicate) {
    if (auto* w = std::get_if<WordEquals>(&*n.predicate)) {
      out += "=\"" + w->word + "\"";
    } else {
      const auto& r = std::get<IntRange>(*n.predicate);
      out += " in " + std::to_string(r.lo) + ".." + std::to_string(r.hi);
    }
  }
  for (auto c : n.children) {
    out += '[';
    write_node(p, c, out);
    out += ']';
  }
  if (n.returned) out += '!';
}

}  // namespace

TreePattern parse_pattern(std::string_view text) { return PatternParser(text).run(); }

std::string to_string(const TreePattern& pattern) {
  std::string out;
  if (pattern.size() > 0) write_node(pattern, 0, out);
  return out;
}

namespace {

bool value_test(const ValuePredicate& pred, const std::string& text) {
  if (auto* w = std::get_if<WordEquals>(&pred)) {
    auto words = xml::words_of(text);
    return std::find(words.begin(), words.end(), w->word) != words.end();
  }
  const auto& r = std::get<IntRange>(pred);
  auto v = xml::integer_content(text);
  return v && *v >= r.lo && *v <= r.hi;
}

}  // namespace

bool node_test(const PatternNode& pn, const xml::Document& doc, xml::NodeId id) {
  const auto& n = doc.node(id);
  if (pn.is_attribute()) {
    if (n.kind != xml::NodeKind::attribute || n.name != pn.label) return false;
  } else {
    if (n.kind != xml::NodeKind::element) return false;
    if (!pn.is_wildcard() && n.name != pn.label) return false;
  }
  if (!pn.predicate) return true;
  if (n.kind == xml::NodeKind::attribute) return value_test(*pn.predicate, n.value);
  for (auto c : n.children) {
    const auto& child = doc.node(c);
    if (child.kind == xml::NodeKind::text && value_test(*pn.predicate, child.value)) return true;
  }
  return false;
}

void sort_canonical(const TreePattern& pattern, std::vector<Binding>& bindings) {
  auto ret = pattern.return_nodes();
  std::sort(bindings.begin(), bindings.end(), [&](const Binding& a, const Binding& b) {
    for (auto i : ret)
      if (a[i] != b[i]) return a[i] < b[i];
    return a < b;
  });
}

std::vector<std::vector<xml::StructuralId>> return_tuples(const TreePattern& pattern,
                                                         const std::vector<Binding>& bindings) {
  auto ret = pattern.return_nodes();
  std::vector<std::vector<xml::StructuralId>> out;
  out.reserve(bindings.size());
  for (const auto& b : bindings) {
    std::vector<xml::StructuralId> t;
    for (auto i : ret) t.push_back(b[i]);
    out.push_back(std::move(t));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace wcstore::tpq
