#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mobility/traffic/feeds.hpp"

namespace mobility::traffic {

inline constexpr std::string_view kIconBase = "iconosIncitar/";
inline constexpr std::string_view kDgtIncidencesUrl = "http://infocar.dgt.es/etraffic/BuscarElementos";

struct Incidence {
  GeoPoint point;
  std::string description;  // plain text
  std::string icon_name;

  [[nodiscard]] std::string icon_url() const { return std::string(kIconBase) + icon_name; }
};

/// Decodes named and numeric character references once. Unknown references
/// are kept verbatim.
[[nodiscard]] std::string decode_html_entities(std::string_view text);

/// One pass of HTML-to-text: drops tags (line breaks for <br> and block
/// ends) and decodes entities.
[[nodiscard]] std::string html_to_text(std::string_view html);

/// Two html_to_text passes, as incidence descriptions arrive double-encoded,
/// plus a final tag strip so no markup survives.
[[nodiscard]] std::string decode_description(std::string_view html);

/// The query parameters the DGT endpoint expects for a Spain-wide view.
[[nodiscard]] const std::vector<std::pair<std::string, std::string>>& dgt_request_params();

/// Supplies the raw JSON body of the incidences endpoint. Throws on
/// transport failure.
class IncidenceSource {
 public:
  virtual ~IncidenceSource() = default;
  virtual std::string fetch() = 0;
};

class FixtureIncidenceSource final : public IncidenceSource {
 public:
  explicit FixtureIncidenceSource(std::filesystem::path path) : path_(std::move(path)) {}
  std::string fetch() override;

 private:
  std::filesystem::path path_;
};

class HttpIncidenceSource final : public IncidenceSource {
 public:
  explicit HttpIncidenceSource(std::string url = std::string(kDgtIncidencesUrl),
                               std::chrono::seconds timeout = std::chrono::seconds(10))
      : url_(std::move(url)), timeout_(timeout) {}
  std::string fetch() override;

 private:
  std::string url_;
  std::chrono::seconds timeout_;
};

/// Parses a JSON array of {lat, lng, icono, descripcion}; lat/lng may be
/// strings or numbers. Bad elements are skipped with a warning (line = index + 1).
[[nodiscard]] ParseResult<Incidence> parse_incidences(std::string_view json);

/// Fetches and parses; transport or top-level parse failure gives an empty
/// list and one warning.
[[nodiscard]] ParseResult<Incidence> fetch_incidences(IncidenceSource& source);

/// Plain HTTP GET of `url` with query parameters. Throws TrafficError on
/// transport errors or non-2xx status.
[[nodiscard]] std::string http_get_text(const std::string& url,
                                        const std::vector<std::pair<std::string, std::string>>& params = {},
                                        std::chrono::seconds timeout = std::chrono::seconds(10));

/// Reads a whole file; throws TrafficError if it cannot be opened.
[[nodiscard]] std::string read_text_file(const std::filesystem::path& path);

}  // namespace mobility::traffic
