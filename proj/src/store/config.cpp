#include "wcstore/store/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

#include "wcstore/error.hpp"

namespace wcstore::store {

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(Errc::invalid_config, what); }

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    auto next = s.find(',', pos);
    if (next == std::string_view::npos) next = s.size();
    auto item = trim(s.substr(pos, next - pos));
    if (!item.empty()) out.push_back(item);
    pos = next + 1;
  }
  return out;
}

template <typename T>
T number(std::string_view key, std::string_view text) {
  T v{};
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size())
    invalid(std::string(key) + ": '" + std::string(text) + "' is not a non-negative integer");
  return v;
}

}  // namespace

std::string_view to_string(Backend backend) { return backend == Backend::p2p ? "p2p" : "centralized"; }

void StoreConfig::validate() const {
  if (peer_count < 1) invalid("peer_count must be >= 1");
  if (std::none_of(overlays.begin(), overlays.end(),
                   [](const OverlaySpec& o) { return o.kind == dht::OverlayKind::hash; }))
    invalid("overlays must include a hash overlay");
  for (std::size_t i = 0; i < overlays.size(); ++i)
    for (std::size_t j = i + 1; j < overlays.size(); ++j)
      if (overlays[i].id == overlays[j].id) invalid("overlay id " + std::to_string(overlays[i].id.value) + " is listed twice");
}

std::string StoreConfig::to_text() const {
  std::string out;
  out += "backend=" + std::string(to_string(backend)) + "\n";
  out += "peer_count=" + std::to_string(peer_count) + "\n";
  out += "overlays=";
  for (std::size_t i = 0; i < overlays.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(overlays[i].id.value) + ":" + std::string(dht::to_string(overlays[i].kind));
  }
  out += "\ngranularity=";
  bool first = true;
  for (const auto& g : granularity) {
    if (!first) out += ',';
    out += g;
    first = false;
  }
  out += "\nsnapshot_path=" + snapshot_path + "\n";
  out += "seed=" + std::to_string(seed) + "\n";
  out += std::string("full_table_routing=") + (full_table_routing ? "true" : "false") + "\n";
  return out;
}

StoreConfig parse_config(std::string_view text) {
  StoreConfig c;
  std::set<std::string> seen;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto next = text.find('\n', pos);
    if (next == std::string_view::npos) next = text.size();
    auto line = trim(text.substr(pos, next - pos));
    pos = next + 1;
    if (line.empty() || line.front() == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) invalid("expected key=value, got '" + std::string(line) + "'");
    auto key = std::string(trim(line.substr(0, eq)));
    auto value = trim(line.substr(eq + 1));
    if (!seen.insert(key).second) invalid("key '" + key + "' given twice");
    if (key == "backend") {
      if (value == "centralized")
        c.backend = Backend::centralized;
      else if (value == "p2p")
        c.backend = Backend::p2p;
      else
        invalid("backend must be centralized or p2p, got '" + std::string(value) + "'");
    } else if (key == "peer_count") {
      c.peer_count = number<std::uint64_t>(key, value);
    } else if (key == "overlays") {
      c.overlays.clear();
      for (auto item : split_list(value)) {
        auto colon = item.find(':');
        if (colon == std::string_view::npos) invalid("overlay entry '" + std::string(item) + "' is not id:kind");
        OverlaySpec spec;
        spec.id = dht::DhtId{number<std::uint32_t>(key, trim(item.substr(0, colon)))};
        auto kind = trim(item.substr(colon + 1));
        if (kind == "hash")
          spec.kind = dht::OverlayKind::hash;
        else if (kind == "range")
          spec.kind = dht::OverlayKind::range;
        else
          invalid("overlay kind must be hash or range, got '" + std::string(kind) + "'");
        c.overlays.push_back(spec);
      }
    } else if (key == "granularity" || key == "resource_granularity") {
      c.granularity.clear();
      for (auto item : split_list(value)) c.granularity.emplace(item);
    } else if (key == "snapshot_path") {
      c.snapshot_path = std::string(value);
    } else if (key == "seed") {
      c.seed = number<std::uint64_t>(key, value);
    } else if (key == "full_table_routing") {
      if (value == "true" || value == "1")
        c.full_table_routing = true;
      else if (value == "false" || value == "0")
        c.full_table_routing = false;
      else
        invalid("full_table_routing must be true or false");
    } else {
      invalid("unknown key '" + key + "'");
    }
  }
  c.validate();
  return c;
}

}  // namespace wcstore::store
