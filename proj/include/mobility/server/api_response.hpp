#pragma once

#include <string>
#include <string_view>

namespace mobility::server {

inline constexpr std::string_view kInserted = "Inserted";
inline constexpr std::string_view kOops = "Oops! An error occurred.";
inline constexpr std::string_view kMissing = "Required field(s) is missing";

/// The two-key reply every ingest endpoint returns.
struct ApiResponse {
  int success = 0;
  std::string message;

  [[nodiscard]] std::string to_json() const;
  /// Throws std::invalid_argument unless `body` is exactly the two-key shape.
  static ApiResponse parse(std::string_view body);
  friend bool operator==(const ApiResponse&, const ApiResponse&) = default;
};

}  // namespace mobility::server
