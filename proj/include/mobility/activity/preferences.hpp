#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace mobility::activity {

/// Key-value preference file in the Android shared-preferences XML layout:
///
///   <?xml version='1.0' encoding='utf-8' standalone='yes' ?>
///   <map>
///       <string name="nombre">Angel</string>
///       <int name="genero" value="0" />
///       <null name="birthday" />
///   </map>
///
/// Edits stay in memory until commit(). Not thread-safe.
class Preferences {
 public:
  using Value = std::variant<std::monostate, std::string, std::int64_t, bool>;

  Preferences() = default;
  /// Loads `path` if it exists; commit() writes back to it.
  explicit Preferences(std::filesystem::path path);

  [[nodiscard]] std::string get_string(std::string_view key, std::string_view fallback) const;
  [[nodiscard]] std::int64_t get_int(std::string_view key, std::int64_t fallback) const;
  [[nodiscard]] bool get_bool(std::string_view key, bool fallback) const;
  [[nodiscard]] bool contains(std::string_view key) const;

  void put_string(std::string_view key, std::string value);
  void put_int(std::string_view key, std::int64_t value);
  void put_bool(std::string_view key, bool value);
  void put_null(std::string_view key);
  void remove(std::string_view key);

  /// Atomically rewrites the backing file. No-op for an unbacked instance.
  void commit() const;

  [[nodiscard]] std::string to_xml() const;
  /// Throws std::runtime_error on malformed documents.
  static std::map<std::string, Value, std::less<>> parse_xml(std::string_view xml);

  [[nodiscard]] const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
  std::map<std::string, Value, std::less<>> values_;
};

}  // namespace mobility::activity
