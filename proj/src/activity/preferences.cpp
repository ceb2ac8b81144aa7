#include "mobility/activity/preferences.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mobility::activity {

namespace {

std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string xml_unescape(std::string_view s) {
  static constexpr std::pair<std::string_view, char> kEntities[] = {
      {"&amp;", '&'}, {"&lt;", '<'}, {"&gt;", '>'}, {"&quot;", '"'}, {"&apos;", '\''}};
  std::string out;
  for (std::size_t i = 0; i < s.size();) {
    bool matched = false;
    if (s[i] == '&') {
      for (auto [ent, ch] : kEntities) {
        if (s.substr(i, ent.size()) == ent) {
          out.push_back(ch);
          i += ent.size();
          matched = true;
          break;
        }
      }
    }
    if (!matched) out.push_back(s[i++]);
  }
  return out;
}

// Value of attribute `name` inside an element's opening tag.
std::optional<std::string> attribute(std::string_view tag, std::string_view name) {
  const std::string needle = std::string(name) + "=";
  std::size_t pos = 0;
  while ((pos = tag.find(needle, pos)) != std::string_view::npos) {
    if (pos == 0 || tag[pos - 1] == ' ' || tag[pos - 1] == '\n' || tag[pos - 1] == '\t') {
      const std::size_t q = pos + needle.size();
      if (q >= tag.size()) return std::nullopt;
      const char quote = tag[q];
      if (quote != '"' && quote != '\'') return std::nullopt;
      const auto end = tag.find(quote, q + 1);
      if (end == std::string_view::npos) return std::nullopt;
      return xml_unescape(tag.substr(q + 1, end - q - 1));
    }
    pos += needle.size();
  }
  return std::nullopt;
}

}  // namespace

Preferences::Preferences(std::filesystem::path path) : path_(std::move(path)) {
  std::ifstream in(path_, std::ios::binary);
  if (!in) return;
  std::ostringstream os;
  os << in.rdbuf();
  values_ = parse_xml(os.str());
}

std::string Preferences::get_string(std::string_view key, std::string_view fallback) const {
  auto it = values_.find(key);
  if (it != values_.end()) {
    if (auto* s = std::get_if<std::string>(&it->second)) return *s;
  }
  return std::string(fallback);
}

std::int64_t Preferences::get_int(std::string_view key, std::int64_t fallback) const {
  auto it = values_.find(key);
  if (it != values_.end()) {
    if (auto* v = std::get_if<std::int64_t>(&it->second)) return *v;
  }
  return fallback;
}

bool Preferences::get_bool(std::string_view key, bool fallback) const {
  auto it = values_.find(key);
  if (it != values_.end()) {
    if (auto* v = std::get_if<bool>(&it->second)) return *v;
  }
  return fallback;
}

bool Preferences::contains(std::string_view key) const { return values_.find(key) != values_.end(); }

void Preferences::put_string(std::string_view key, std::string value) { values_[std::string(key)] = std::move(value); }
void Preferences::put_int(std::string_view key, std::int64_t value) { values_[std::string(key)] = value; }
void Preferences::put_bool(std::string_view key, bool value) { values_[std::string(key)] = value; }
void Preferences::put_null(std::string_view key) { values_[std::string(key)] = std::monostate{}; }

void Preferences::remove(std::string_view key) {
  if (auto it = values_.find(key); it != values_.end()) values_.erase(it);
}

std::string Preferences::to_xml() const {
  std::ostringstream os;
  os << "<?xml version='1.0' encoding='utf-8' standalone='yes' ?>\n<map>\n";
  for (const auto& [key, value] : values_) {
    const auto name = xml_escape(key);
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, std::monostate>) {
            os << "    <null name=\"" << name << "\" />\n";
          } else if constexpr (std::is_same_v<T, std::string>) {
            os << "    <string name=\"" << name << "\">" << xml_escape(v) << "</string>\n";
          } else if constexpr (std::is_same_v<T, bool>) {
            os << "    <boolean name=\"" << name << "\" value=\"" << (v ? "true" : "false") << "\" />\n";
          } else {
            os << "    <" << (v >= INT32_MIN && v <= INT32_MAX ? "int" : "long") << " name=\"" << name
               << "\" value=\"" << v << "\" />\n";
          }
        },
        value);
  }
  os << "</map>\n";
  return os.str();
}

std::map<std::string, Preferences::Value, std::less<>> Preferences::parse_xml(std::string_view xml) {
  std::map<std::string, Value, std::less<>> out;
  const auto map_open = xml.find("<map");
  if (map_open == std::string_view::npos) {
    if (xml.find_first_not_of(" \t\r\n") == std::string_view::npos) return out;
    throw std::runtime_error("preferences: missing <map> element");
  }
  std::size_t pos = xml.find('>', map_open);
  if (pos == std::string_view::npos) throw std::runtime_error("preferences: unterminated <map>");
  if (xml[pos - 1] == '/') return out;
  ++pos;

  while (true) {
    const auto lt = xml.find('<', pos);
    if (lt == std::string_view::npos) throw std::runtime_error("preferences: missing </map>");
    const auto gt = xml.find('>', lt);
    if (gt == std::string_view::npos) throw std::runtime_error("preferences: unterminated element");
    std::string_view tag = xml.substr(lt + 1, gt - lt - 1);
    if (tag.starts_with("/map")) break;
    const bool self_closing = !tag.empty() && tag.back() == '/';
    if (self_closing) tag.remove_suffix(1);
    const auto sp = tag.find_first_of(" \t\n");
    const std::string_view type = tag.substr(0, sp);
    auto name = attribute(tag, "name");
    if (!name) throw std::runtime_error("preferences: element without name");

    if (type == "string") {
      if (self_closing) {
        out[*name] = std::string();
        pos = gt + 1;
        continue;
      }
      const auto close = xml.find("</string>", gt);
      if (close == std::string_view::npos) throw std::runtime_error("preferences: unterminated <string>");
      out[*name] = xml_unescape(xml.substr(gt + 1, close - gt - 1));
      pos = close + 9;
      continue;
    }
    if (type == "null") {
      out[*name] = std::monostate{};
    } else if (type == "int" || type == "long") {
      auto v = attribute(tag, "value");
      std::int64_t n = 0;
      if (!v || std::from_chars(v->data(), v->data() + v->size(), n).ec != std::errc{}) {
        throw std::runtime_error("preferences: bad integer for " + *name);
      }
      out[*name] = n;
    } else if (type == "boolean") {
      auto v = attribute(tag, "value");
      if (!v || (*v != "true" && *v != "false")) throw std::runtime_error("preferences: bad boolean for " + *name);
      out[*name] = *v == "true";
    } else {
      throw std::runtime_error("preferences: unsupported element <" + std::string(type) + ">");
    }
    if (!self_closing) {
      const std::string close = "</" + std::string(type) + ">";
      const auto c = xml.find(close, gt);
      if (c == std::string_view::npos) throw std::runtime_error("preferences: unterminated element");
      pos = c + close.size();
    } else {
      pos = gt + 1;
    }
  }
  return out;
}

void Preferences::commit() const {
  if (path_.empty()) return;
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
  auto tmp = path_;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << to_xml();
  }
  std::filesystem::rename(tmp, path_);
}

}  // namespace mobility::activity
