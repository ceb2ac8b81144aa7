#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mobility/core/date.hpp"
#include "mobility/core/segment.hpp"

namespace mobility::store {

class StoreError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::string_view kUploaded = "OK";
inline constexpr std::string_view kPending = "PENDING";
inline constexpr std::string_view kAllActivities = "All";

/// Optional profile fields; absent ones keep the anonymous defaults on
/// insert and are left untouched on update.
struct UserProfile {
  std::optional<std::string> nombre;
  std::optional<std::string> apellido;
  std::optional<double> peso;
  std::optional<CivilDate> nacimiento;
  std::optional<std::string> genero;
  std::optional<std::string> mail;
};

struct UserRecord {
  std::int64_t usu_id = 0;
  std::string usu_hash;
  std::string usu_regid;
  std::string usu_nombre;
  std::string usu_apellido;
  double usu_peso = 0.0;
  std::string usu_nacimiento;
  std::string usu_genero;
  std::string usu_mail;
};

struct SegmentRecord {
  std::int64_t seg_id = 0;
  std::string seg_activity;
  double seg_distance = 0.0;
  int seg_duration = 0;
  double seg_speed = 0.0;
  std::string seg_firsttime;  // "YYYY-MM-DD HH:MM:SS"
  std::string seg_lasttime;
  std::string usu_hash;
  std::string seg_subido;
};

/// Fields of one location row as submitted; ids are assigned by the store.
struct NewLocation {
  std::string power;  // "<gsm>V<wifi>" or empty
  double latitude = 0.0;
  double longitude = 0.0;
  std::string time;  // "HH:MM:SS"
  std::string date;  // "YYYY-MM-DD"
};

struct LocationRecord {
  std::int64_t loc_id = 0;
  std::string loc_power;
  std::int64_t seg_id = 0;
  double loc_latitude = 0.0;
  double loc_longitude = 0.0;
  std::string loc_time;
  std::string loc_date;
};

struct LocationFilter {
  int age_min = 0;
  int age_max = 0;
  std::string activity{kAllActivities};
  DateTime from;
  DateTime to;
};

/// One row of the analyst query, in (seg_id, loc_id) order.
struct QueryRow {
  double lat = 0.0;
  double lon = 0.0;
  std::string time;
  std::string date;
  std::string activity;
  std::int64_t seg_id = 0;
  std::int64_t loc_id = 0;

  friend bool operator==(const QueryRow&, const QueryRow&) = default;
};

/// Embedded SQL store for users, segments and locations.
///
/// Writes are serialized through one connection. For file-backed stores,
/// queries run on their own read-only connection and see a consistent
/// snapshot; an in-memory store shares the writer connection.
class Store {
 public:
  /// Opens (creating if needed) the database and applies the schema.
  /// ":memory:" gives a private in-memory database.
  explicit Store(const std::string& path);
  ~Store();
  Store(const Store&) = delete;
  Store& operator=(const Store&) = delete;

  UserRecord upsert_user(std::string_view usu_hash, std::string_view usu_regid, const UserProfile& profile = {});
  [[nodiscard]] std::optional<UserRecord> find_user(std::string_view usu_hash) const;

  /// New segment row in the pending state. Throws StoreError("no such user").
  SegmentRecord insert_segment(std::string_view owner_hash, const SegmentMetrics& metrics, std::string_view activity,
                               const DateTime& first, const DateTime& last);

  /// Inserts every location and flags the segment "OK" in one transaction.
  /// Any failing row rolls the whole batch back and leaves the flag pending.
  /// An empty batch inserts nothing and leaves the flag pending.
  std::size_t insert_locations(std::int64_t seg_id, std::span<const NewLocation> locations);

  /// Flags the segment "OK" when it holds exactly `expected_count` (> 0)
  /// locations. Returns whether the flag was set.
  bool mark_uploaded(std::int64_t seg_id, std::size_t expected_count);

  [[nodiscard]] std::optional<SegmentRecord> find_segment(std::int64_t seg_id) const;
  [[nodiscard]] std::vector<SegmentRecord> segments_of(std::string_view usu_hash) const;
  [[nodiscard]] std::vector<LocationRecord> locations_of(std::int64_t seg_id) const;

  /// Locations of users whose calendar-year age (reference_year minus birth
  /// year) lies in [age_min, age_max], optionally of one activity, stamped
  /// within [from, to]. Throws StoreError("invalid range") for inverted ranges.
  [[nodiscard]] std::vector<QueryRow> query_locations(const LocationFilter& filter, int reference_year) const;
  [[nodiscard]] std::vector<QueryRow> query_locations(const LocationFilter& filter) const;

  [[nodiscard]] std::vector<std::string> distinct_activities() const;

  [[nodiscard]] std::int64_t count_users() const;
  [[nodiscard]] std::int64_t count_segments() const;
  [[nodiscard]] std::int64_t count_locations() const;

  [[nodiscard]] const std::string& path() const noexcept { return path_; }

 private:
  struct Impl;
  std::string path_;
  std::unique_ptr<Impl> impl_;
};

/// Loads every segment of a segment file for `owner_hash`, creating the user
/// with defaults if needed. Locations are dated from `date`, advancing a day
/// whenever a sample time wraps past midnight. Returns the new segment ids.
std::vector<std::int64_t> load_segment_text(Store& store, std::string_view owner_hash, std::string_view text,
                                            const CivilDate& date);
std::vector<std::int64_t> load_segment_file(Store& store, std::string_view owner_hash,
                                            const std::filesystem::path& path, const CivilDate& date);

/// Persists one parsed segment and its samples; shared by the fixture loader
/// and the upload endpoint. Returns the new segment id.
std::int64_t store_segment(Store& store, std::string_view owner_hash, const Segment& segment, const CivilDate& date);

}  // namespace mobility::store
