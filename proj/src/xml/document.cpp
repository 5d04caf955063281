#include "wcstore/xml/document.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "wcstore/error.hpp"

namespace wcstore::xml {

std::string to_string(const StructuralId& sid) {
  std::ostringstream os;
  os << '(' << sid.doc_id << ',' << sid.start << ',' << sid.end << ',' << sid.depth << ')';
  return os.str();
}

bool is_ancestor(const StructuralId& a, const StructuralId& d) {
  return a.doc_id == d.doc_id && a.start < d.start && d.end < a.end;
}

bool is_parent(const StructuralId& a, const StructuralId& d) {
  return is_ancestor(a, d) && d.depth == a.depth + 1;
}

Document::Document(std::uint64_t doc_id, std::vector<Node> nodes)
    : doc_id_(doc_id), nodes_(std::move(nodes)) {}

std::optional<NodeId> Document::find(const StructuralId& label) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), label.start,
                             [](const Node& n, std::uint64_t s) { return n.label.start < s; });
  if (it == nodes_.end() || it->label != label) return std::nullopt;
  return static_cast<NodeId>(it - nodes_.begin());
}

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

bool is_name_start(char c) {
  auto u = static_cast<unsigned char>(c);
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_' || c == ':' || u >= 0x80;
}

bool is_name_char(char c) {
  return is_name_start(c) || (c >= '0' && c <= '9') || c == '-' || c == '.';
}

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

class Parser {
 public:
  Parser(std::string_view text, std::uint64_t doc_id) : in_(text), doc_id_(doc_id) {}

  Document run() {
    skip_misc();
    if (at_end()) throw Error(Errc::empty_input, "no root element");
    if (peek() != '<') fail("text outside the root element");
    parse_element();
    skip_misc();
    if (!at_end()) {
      if (peek() == '<') fail("multiple root elements");
      fail("text after the root element");
    }
    return Document(doc_id_, std::move(nodes_));
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(Errc::malformed_xml, what + " (offset " + std::to_string(pos_) + ")");
  }

  bool at_end() const { return pos_ >= in_.size(); }
  char peek() const { return in_[pos_]; }
  bool starts_with(std::string_view s) const { return in_.substr(pos_, s.size()) == s; }

  void expect(std::string_view s) {
    if (!starts_with(s)) fail("expected '" + std::string(s) + "'");
    pos_ += s.size();
  }

  void skip_space() {
    while (!at_end() && is_space(peek())) ++pos_;
  }

  void skip_until(std::string_view terminator) {
    auto at = in_.find(terminator, pos_);
    if (at == std::string_view::npos) fail("unterminated construct");
    pos_ = at + terminator.size();
  }

  void skip_doctype() {
    int bracket = 0;
    while (!at_end()) {
      char c = in_[pos_++];
      if (c == '[') ++bracket;
      else if (c == ']') --bracket;
      else if (c == '>' && bracket == 0) return;
    }
    fail("unterminated DOCTYPE");
  }

  // Prolog / epilog: whitespace, comments, PIs, DOCTYPE.
  void skip_misc() {
    for (;;) {
      skip_space();
      if (starts_with("<?")) skip_until("?>");
      else if (starts_with("<!--")) skip_until("-->");
      else if (starts_with("<!DOCTYPE")) skip_doctype();
      else return;
    }
  }

  std::string parse_name() {
    if (at_end() || !is_name_start(peek())) fail("expected a name");
    auto begin = pos_;
    while (!at_end() && is_name_char(peek())) ++pos_;
    return std::string(in_.substr(begin, pos_ - begin));
  }

  void parse_reference(std::string& out) {
    auto semi = in_.find(';', pos_);
    if (semi == std::string_view::npos || semi - pos_ > 12) fail("bad entity reference");
    auto ref = in_.substr(pos_ + 1, semi - pos_ - 1);
    if (ref == "lt") out += '<';
    else if (ref == "gt") out += '>';
    else if (ref == "amp") out += '&';
    else if (ref == "quot") out += '"';
    else if (ref == "apos") out += '\'';
    else if (ref.size() > 1 && ref[0] == '#') {
      int base = 10;
      auto digits = ref.substr(1);
      if (digits[0] == 'x' || digits[0] == 'X') {
        base = 16;
        digits = digits.substr(1);
      }
      std::uint32_t cp = 0;
      auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), cp, base);
      if (ec != std::errc() || p != digits.data() + digits.size() || cp == 0 || cp > 0x10FFFF)
        fail("bad character reference");
      append_utf8(out, cp);
    } else {
      fail("unknown entity '" + std::string(ref) + "'");
    }
    pos_ = semi + 1;
  }

  NodeId add_node(NodeKind kind, std::string name, std::string value, std::optional<NodeId> parent,
                  std::uint64_t depth) {
    Node n;
    n.kind = kind;
    n.name = std::move(name);
    n.value = std::move(value);
    n.parent = parent;
    n.label.doc_id = doc_id_;
    n.label.start = ++counter_;
    n.label.end = kind == NodeKind::element ? 0 : n.label.start;
    n.label.depth = depth;
    auto id = static_cast<NodeId>(nodes_.size());
    nodes_.push_back(std::move(n));
    if (parent) nodes_[*parent].children.push_back(id);
    return id;
  }

  void flush_text(std::string& text, NodeId parent, std::uint64_t depth) {
    bool blank = std::all_of(text.begin(), text.end(), is_space);
    if (!blank) add_node(NodeKind::text, {}, std::move(text), parent, depth);
    text.clear();
  }

  void parse_element() {
    struct Open {
      NodeId id;
      std::string name;
    };
    std::vector<Open> stack;
    std::string text;

    auto open_tag = [&] {
      ++pos_;  // '<'
      auto name = parse_name();
      std::optional<NodeId> parent;
      if (!stack.empty()) parent = stack.back().id;
      auto depth = stack.size() + 1;
      auto id = add_node(NodeKind::element, name, {}, parent, depth);
      std::vector<std::string> seen;
      for (;;) {
        bool had_space = !at_end() && is_space(peek());
        skip_space();
        if (at_end()) fail("unterminated start tag");
        if (starts_with("/>")) {
          pos_ += 2;
          nodes_[id].label.end = ++counter_;
          return;
        }
        if (peek() == '>') {
          ++pos_;
          stack.push_back({id, std::move(name)});
          return;
        }
        if (!had_space) fail("expected whitespace before attribute");
        auto attr = parse_name();
        if (std::find(seen.begin(), seen.end(), attr) != seen.end())
          fail("duplicate attribute '" + attr + "'");
        seen.push_back(attr);
        skip_space();
        expect("=");
        skip_space();
        if (at_end() || (peek() != '"' && peek() != '\'')) fail("expected quoted attribute value");
        char quote = in_[pos_++];
        std::string value;
        for (;;) {
          if (at_end()) fail("unterminated attribute value");
          char c = peek();
          if (c == quote) {
            ++pos_;
            break;
          }
          if (c == '<') fail("'<' in attribute value");
          if (c == '&') parse_reference(value);
          else {
            value += c;
            ++pos_;
          }
        }
        add_node(NodeKind::attribute, "@" + attr, std::move(value), id, depth + 1);
      }
    };

    open_tag();
    while (!stack.empty()) {
      if (at_end()) fail("unclosed element <" + stack.back().name + ">");
      char c = peek();
      if (c == '<') {
        if (starts_with("<!--")) {
          skip_until("-->");
        } else if (starts_with("<![CDATA[")) {
          pos_ += 9;
          auto at = in_.find("]]>", pos_);
          if (at == std::string_view::npos) fail("unterminated CDATA");
          text.append(in_.substr(pos_, at - pos_));
          pos_ = at + 3;
        } else if (starts_with("<?")) {
          skip_until("?>");
        } else if (starts_with("</")) {
          flush_text(text, stack.back().id, stack.size() + 1);
          pos_ += 2;
          auto name = parse_name();
          if (name != stack.back().name)
            fail("mismatched close tag </" + name + "> for <" + stack.back().name + ">");
          skip_space();
          expect(">");
          nodes_[stack.back().id].label.end = ++counter_;
          stack.pop_back();
        } else if (starts_with("<!")) {
          fail("unexpected markup declaration");
        } else {
          flush_text(text, stack.back().id, stack.size() + 1);
          open_tag();
        }
      } else if (c == '&') {
        parse_reference(text);
      } else {
        text += c;
        ++pos_;
      }
    }
  }

  std::string_view in_;
  std::size_t pos_ = 0;
  std::uint64_t doc_id_;
  std::uint64_t counter_ = 0;
  std::vector<Node> nodes_;
};

void escape_into(std::string& out, std::string_view s, bool attribute) {
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += attribute ? ">" : "&gt;"; break;
      case '"': out += attribute ? "&quot;" : "\""; break;
      default: out += c;
    }
  }
}

void serialize_into(const Document& doc, NodeId id, std::string& out) {
  const Node& n = doc.node(id);
  switch (n.kind) {
    case NodeKind::text:
      escape_into(out, n.value, false);
      return;
    case NodeKind::attribute:
      out += n.name.substr(1);
      out += "=\"";
      escape_into(out, n.value, true);
      out += '"';
      return;
    case NodeKind::element:
      break;
  }
  out += '<';
  out += n.name;
  bool has_content = false;
  for (auto child : n.children) {
    const Node& c = doc.node(child);
    if (c.kind == NodeKind::attribute) {
      out += ' ';
      serialize_into(doc, child, out);
    } else {
      has_content = true;
    }
  }
  if (!has_content) {
    out += "/>";
    return;
  }
  out += '>';
  for (auto child : n.children) {
    if (doc.node(child).kind != NodeKind::attribute) serialize_into(doc, child, out);
  }
  out += "</";
  out += n.name;
  out += '>';
}

}  // namespace

Document parse_document(std::string_view xml_text, std::uint64_t doc_id) {
  if (doc_id == 0) throw Error(Errc::invalid_argument, "doc_id must be positive");
  return Parser(xml_text, doc_id).run();
}

std::string serialize_subtree(const Document& doc, NodeId root) {
  if (root >= doc.size()) throw Error(Errc::unknown_node, "node " + std::to_string(root));
  std::string out;
  serialize_into(doc, root, out);
  return out;
}

std::string serialize_subtree(const Document& doc, const StructuralId& root_label) {
  auto id = doc.find(root_label);
  if (!id) throw Error(Errc::unknown_node, to_string(root_label));
  return serialize_subtree(doc, *id);
}

std::string resource_id_for(const StructuralId& sid) {
  return std::to_string(sid.doc_id) + "#" + std::to_string(sid.start);
}

std::vector<Resource> extract_resources(const Document& doc,
                                        const std::set<std::string>& granularity) {
  std::vector<Resource> out;
  for (NodeId id = 0; id < doc.size(); ++id) {
    const Node& n = doc.node(id);
    if (n.kind != NodeKind::element) continue;
    if (id != doc.root() && !granularity.contains(n.name)) continue;
    out.push_back(Resource{resource_id_for(n.label), doc.doc_id(), n.label, serialize_subtree(doc, id)});
  }
  return out;
}

std::vector<std::string> words_of(std::string_view text) {
  std::vector<std::string> words;
  std::string cur;
  for (char c : text) {
    auto u = static_cast<unsigned char>(c);
    bool word_char = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || u >= 0x80;
    if (word_char) {
      cur += (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
    } else if (!cur.empty()) {
      words.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) words.push_back(std::move(cur));
  return words;
}

std::optional<std::int64_t> integer_content(std::string_view text) {
  while (!text.empty() && is_space(text.front())) text.remove_prefix(1);
  while (!text.empty() && is_space(text.back())) text.remove_suffix(1);
  if (text.empty()) return std::nullopt;
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size()) return std::nullopt;
  return v;
}

}  // namespace wcstore::xml
