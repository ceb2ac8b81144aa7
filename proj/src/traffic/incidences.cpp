#include "mobility/traffic/incidences.hpp"

#include <httplib.h>

#include <cctype>
#include <charconv>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <unordered_map>

namespace mobility::traffic {

namespace {

const std::unordered_map<std::string_view, char32_t>& named_entities() {
  static const std::unordered_map<std::string_view, char32_t> table = {
      {"amp", U'&'},       {"lt", U'<'},        {"gt", U'>'},        {"quot", U'"'},      {"apos", U'\''},
      {"nbsp", 0xA0},      {"iexcl", 0xA1},     {"cent", 0xA2},      {"pound", 0xA3},     {"euro", 0x20AC},
      {"sect", 0xA7},      {"copy", 0xA9},      {"ordf", 0xAA},      {"laquo", 0xAB},     {"reg", 0xAE},
      {"deg", 0xB0},       {"middot", 0xB7},    {"ordm", 0xBA},      {"raquo", 0xBB},     {"iquest", 0xBF},
      {"Agrave", 0xC0},    {"Aacute", 0xC1},    {"Acirc", 0xC2},     {"Auml", 0xC4},      {"Ccedil", 0xC7},
      {"Egrave", 0xC8},    {"Eacute", 0xC9},    {"Ecirc", 0xCA},     {"Euml", 0xCB},      {"Igrave", 0xCC},
      {"Iacute", 0xCD},    {"Iuml", 0xCF},      {"Ntilde", 0xD1},    {"Ograve", 0xD2},    {"Oacute", 0xD3},
      {"Ouml", 0xD6},      {"Ugrave", 0xD9},    {"Uacute", 0xDA},    {"Uuml", 0xDC},      {"agrave", 0xE0},
      {"aacute", 0xE1},    {"acirc", 0xE2},     {"auml", 0xE4},      {"ccedil", 0xE7},    {"egrave", 0xE8},
      {"eacute", 0xE9},    {"ecirc", 0xEA},     {"euml", 0xEB},      {"igrave", 0xEC},    {"iacute", 0xED},
      {"iuml", 0xEF},      {"ntilde", 0xF1},    {"ograve", 0xF2},    {"oacute", 0xF3},    {"ouml", 0xF6},
      {"ugrave", 0xF9},    {"uacute", 0xFA},    {"uuml", 0xFC},      {"ndash", 0x2013},   {"mdash", 0x2014},
      {"lsquo", 0x2018},   {"rsquo", 0x2019},   {"ldquo", 0x201C},   {"rdquo", 0x201D},   {"hellip", 0x2026},
  };
  return table;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool decode_reference(std::string_view name, char32_t& cp) {
  if (name.size() > 1 && name[0] == '#') {
    int base = 10;
    name.remove_prefix(1);
    if (!name.empty() && (name[0] == 'x' || name[0] == 'X')) {
      base = 16;
      name.remove_prefix(1);
    }
    std::uint32_t value = 0;
    const auto [ptr, ec] = std::from_chars(name.data(), name.data() + name.size(), value, base);
    if (ec != std::errc() || ptr != name.data() + name.size() || name.empty()) return false;
    if (value == 0 || value > 0x10FFFF || (value >= 0xD800 && value <= 0xDFFF)) return false;
    cp = value;
    return true;
  }
  const auto& table = named_entities();
  const auto it = table.find(name);
  if (it == table.end()) return false;
  cp = it->second;
  return true;
}

std::string strip_tags(std::string_view html) {
  std::string out;
  std::size_t i = 0;
  while (i < html.size()) {
    if (html[i] == '<') {
      const auto close = html.find('>', i);
      if (close == std::string_view::npos) {
        out.append(html.substr(i));
        break;
      }
      auto tag = html.substr(i + 1, close - i - 1);
      std::string lower;
      for (const char c : tag) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
      if (lower.starts_with("br") || lower == "/p" || lower == "/div" || lower == "/li") out.push_back('\n');
      i = close + 1;
    } else {
      out.push_back(html[i++]);
    }
  }
  return out;
}

std::string trim_copy(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return std::string(s.substr(b, s.find_last_not_of(ws) - b + 1));
}

bool json_coordinate(const nlohmann::json& v, double& out) {
  if (v.is_number()) {
    out = v.get<double>();
    return true;
  }
  if (!v.is_string()) return false;
  const auto& s = v.get_ref<const std::string&>();
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && !s.empty();
}

}  // namespace

std::string decode_html_entities(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '&') {
      const auto semi = text.find(';', i + 1);
      char32_t cp = 0;
      if (semi != std::string_view::npos && semi - i <= 12 && decode_reference(text.substr(i + 1, semi - i - 1), cp)) {
        append_utf8(out, cp);
        i = semi + 1;
        continue;
      }
    }
    out.push_back(text[i++]);
  }
  return out;
}

std::string html_to_text(std::string_view html) { return trim_copy(decode_html_entities(strip_tags(html))); }

std::string decode_description(std::string_view html) {
  return trim_copy(strip_tags(html_to_text(html_to_text(html))));
}

const std::vector<std::pair<std::string, std::string>>& dgt_request_params() {
  static const std::vector<std::pair<std::string, std::string>> params = {
      {"latNS", "44.33956524809713"},
      {"longNS", "30.1904296875"},
      {"latSW", "26.745610382199022"},
      {"longSW", "-39.287109375"},
      {"zoom", "5"},
      {"accion", "getElementos"},
      {"Camaras", "false"},
      {"SensoresTrafico", "false"},
      {"SensoresMeteorologico", "false"},
      {"Paneles", "false"},
      {"IncidenciasRETENCION", "true"},
      {"IncidenciasOBRAS", "false"},
      {"IncidenciasMETEOROLOGICA", "true"},
      {"IncidenciasPUERTOS", "true"},
      {"IncidenciasOTROS", "true"},
      {"IncidenciasEVENTOS", "true"},
      {"niveles", "false"},
      {"caracter", "acontecimiento"},
  };
  return params;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TrafficError("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string FixtureIncidenceSource::fetch() { return read_text_file(path_); }

std::string HttpIncidenceSource::fetch() { return http_get_text(url_, dgt_request_params(), timeout_); }

std::string http_get_text(const std::string& url, const std::vector<std::pair<std::string, std::string>>& params,
                          std::chrono::seconds timeout) {
  constexpr std::string_view scheme = "http://";
  if (!url.starts_with(scheme)) throw TrafficError("only http:// URLs are supported: " + url);
  const auto path_at = url.find('/', scheme.size());
  const std::string origin = path_at == std::string::npos ? url : url.substr(0, path_at);
  const std::string path = path_at == std::string::npos ? "/" : url.substr(path_at);

  httplib::Client client(origin);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_follow_location(true);
  httplib::Params query;
  for (const auto& [k, v] : params) query.emplace(k, v);
  const auto res = client.Get(path, query, httplib::Headers{});
  if (!res) throw TrafficError("request to " + origin + " failed: " + httplib::to_string(res.error()));
  if (res->status < 200 || res->status >= 300) {
    throw TrafficError("request to " + url + " returned HTTP " + std::to_string(res->status));
  }
  return res->body;
}

ParseResult<Incidence> parse_incidences(std::string_view json) {
  ParseResult<Incidence> result;
  const auto doc = nlohmann::json::parse(json.begin(), json.end(), nullptr, false);
  if (doc.is_discarded() || !doc.is_array()) throw TrafficError("incidences response is not a JSON array");
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& e = doc[i];
    const auto warn = [&](std::string msg) { result.warnings.push_back({i + 1, std::move(msg)}); };
    if (!e.is_object()) {
      warn("element is not an object");
      continue;
    }
    double lat = 0.0;
    double lon = 0.0;
    if (!e.contains("lat") || !e.contains("lng") || !json_coordinate(e["lat"], lat) ||
        !json_coordinate(e["lng"], lon)) {
      warn("missing or non-numeric lat/lng");
      continue;
    }
    const GeoPoint p{lat, lon};
    if (!is_valid(p)) {
      warn("coordinates out of range");
      continue;
    }
    Incidence inc;
    inc.point = p;
    if (e.contains("icono") && e["icono"].is_string()) inc.icon_name = e["icono"].get<std::string>();
    if (e.contains("descripcion") && e["descripcion"].is_string()) {
      inc.description = decode_description(e["descripcion"].get<std::string>());
    }
    result.items.push_back(std::move(inc));
  }
  return result;
}

ParseResult<Incidence> fetch_incidences(IncidenceSource& source) {
  try {
    return parse_incidences(source.fetch());
  } catch (const std::exception& e) {
    ParseResult<Incidence> empty;
    empty.warnings.push_back({0, std::string("incidences unavailable: ") + e.what()});
    return empty;
  }
}

}  // namespace mobility::traffic
