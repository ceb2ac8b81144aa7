#include "mobility/store/store.hpp"

#include <fstream>
#include <sstream>

#include "schema_sql.hpp"
#include "sqlite.hpp"

namespace mobility::store {

namespace {

constexpr int kSchemaVersion = 1;

constexpr std::string_view kUserColumns =
    "usu_id, usu_hash, usu_regid, usu_nombre, usu_apellido, usu_peso, usu_nacimiento, usu_genero, usu_mail";
constexpr std::string_view kSegmentColumns =
    "seg_id, seg_activity, seg_distance, seg_duration, seg_speed, seg_firsttime, seg_lasttime, usu_hash, seg_subido";
constexpr std::string_view kLocationColumns =
    "loc_id, loc_power, seg_id, loc_latitude, loc_longitude, loc_time, loc_date";

UserRecord read_user(const sql::Statement& s) {
  return {s.column_int(0),    s.column_text(1), s.column_text(2), s.column_text(3), s.column_text(4),
          s.column_double(5), s.column_text(6), s.column_text(7), s.column_text(8)};
}

SegmentRecord read_segment(const sql::Statement& s) {
  return {s.column_int(0),  s.column_text(1), s.column_double(2), static_cast<int>(s.column_int(3)),
          s.column_double(4), s.column_text(5), s.column_text(6),  s.column_text(7), s.column_text(8)};
}

LocationRecord read_location(const sql::Statement& s) {
  return {s.column_int(0),    s.column_text(1), s.column_int(2), s.column_double(3),
          s.column_double(4), s.column_text(5), s.column_text(6)};
}

void configure(sql::Connection& c) { c.exec("PRAGMA foreign_keys = ON"); }

}  // namespace

struct Store::Impl {
  bool in_memory = false;
  mutable std::mutex write_mu;
  sql::Connection writer;

  explicit Impl(const std::string& path)
      : in_memory(path == ":memory:" || path.empty()),
        writer(in_memory ? ":memory:" : path, SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE | SQLITE_OPEN_FULLMUTEX) {
    configure(writer);
    if (!in_memory) writer.exec("PRAGMA journal_mode = WAL");
    migrate();
  }

  void migrate() {
    sql::Statement v(writer, "PRAGMA user_version");
    v.step();
    const auto version = v.column_int(0);
    if (version >= kSchemaVersion) return;
    sql::Transaction tx(writer);
    writer.exec(kSchemaV1);
    writer.exec("PRAGMA user_version = " + std::to_string(kSchemaVersion));
    tx.commit();
  }

  // Runs `fn` on a connection suitable for reading.
  template <typename Fn>
  auto read(const std::string& path, Fn&& fn) const {
    if (in_memory) {
      std::lock_guard lock(write_mu);
      return fn(const_cast<sql::Connection&>(writer));
    }
    sql::Connection reader(path, SQLITE_OPEN_READONLY | SQLITE_OPEN_NOMUTEX);
    configure(reader);
    // one read transaction gives the whole query a single snapshot
    reader.exec("BEGIN");
    auto result = fn(reader);
    reader.exec("COMMIT");
    return result;
  }
};

Store::Store(const std::string& path) : path_(path), impl_(std::make_unique<Impl>(path)) {}
Store::~Store() = default;

UserRecord Store::upsert_user(std::string_view usu_hash, std::string_view usu_regid, const UserProfile& profile) {
  if (usu_hash.empty()) throw StoreError("empty user hash");

  std::vector<std::string> columns = {"usu_hash", "usu_regid"};
  if (profile.nombre) columns.emplace_back("usu_nombre");
  if (profile.apellido) columns.emplace_back("usu_apellido");
  if (profile.peso) columns.emplace_back("usu_peso");
  if (profile.nacimiento) columns.emplace_back("usu_nacimiento");
  if (profile.genero) columns.emplace_back("usu_genero");
  if (profile.mail) columns.emplace_back("usu_mail");

  std::ostringstream q;
  q << "INSERT INTO tbl_usuarios (";
  for (std::size_t i = 0; i < columns.size(); ++i) q << (i ? ", " : "") << columns[i];
  q << ") VALUES (";
  for (std::size_t i = 0; i < columns.size(); ++i) q << (i ? ", " : "") << "?" << i + 1;
  q << ") ON CONFLICT (usu_hash) DO UPDATE SET ";
  for (std::size_t i = 1; i < columns.size(); ++i) {
    q << (i > 1 ? ", " : "") << columns[i] << " = excluded." << columns[i];
  }

  std::lock_guard lock(impl_->write_mu);
  sql::Transaction tx(impl_->writer);
  sql::Statement st(impl_->writer, q.str());
  int idx = 1;
  st.bind(idx++, usu_hash).bind(idx++, usu_regid);
  if (profile.nombre) st.bind(idx++, *profile.nombre);
  if (profile.apellido) st.bind(idx++, *profile.apellido);
  if (profile.peso) st.bind(idx++, *profile.peso);
  if (profile.nacimiento) st.bind(idx++, profile.nacimiento->to_string());
  if (profile.genero) st.bind(idx++, *profile.genero);
  if (profile.mail) st.bind(idx++, *profile.mail);
  st.step();

  sql::Statement sel(impl_->writer, "SELECT " + std::string(kUserColumns) + " FROM tbl_usuarios WHERE usu_hash = ?1");
  sel.bind(1, usu_hash);
  if (!sel.step()) throw StoreError("user vanished after upsert");
  auto rec = read_user(sel);
  tx.commit();
  return rec;
}

std::optional<UserRecord> Store::find_user(std::string_view usu_hash) const {
  return impl_->read(path_, [&](sql::Connection& c) -> std::optional<UserRecord> {
    sql::Statement s(c, "SELECT " + std::string(kUserColumns) + " FROM tbl_usuarios WHERE usu_hash = ?1");
    s.bind(1, usu_hash);
    if (!s.step()) return std::nullopt;
    return read_user(s);
  });
}

SegmentRecord Store::insert_segment(std::string_view owner_hash, const SegmentMetrics& metrics,
                                    std::string_view activity, const DateTime& first, const DateTime& last) {
  std::lock_guard lock(impl_->write_mu);
  auto& w = impl_->writer;
  sql::Transaction tx(w);
  {
    sql::Statement owner(w, "SELECT 1 FROM tbl_usuarios WHERE usu_hash = ?1");
    owner.bind(1, owner_hash);
    if (!owner.step()) throw StoreError("no such user");
  }
  sql::Statement st(w,
                    "INSERT INTO tbl_Segmento (seg_activity, seg_distance, seg_duration, seg_speed, seg_firsttime, "
                    "seg_lasttime, usu_hash, seg_subido) VALUES (?1, ?2, ?3, ?4, ?5, ?6, ?7, ?8)");
  st.bind(1, activity)
      .bind(2, metrics.distance_m)
      .bind(3, metrics.duration_s)
      .bind(4, metrics.speed_kmh)
      .bind(5, first.to_string())
      .bind(6, last.to_string())
      .bind(7, owner_hash)
      .bind(8, kPending);
  st.step();
  SegmentRecord rec{w.last_insert_rowid(), std::string(activity), metrics.distance_m, metrics.duration_s,
                    metrics.speed_kmh,     first.to_string(),      last.to_string(),   std::string(owner_hash),
                    std::string(kPending)};
  tx.commit();
  return rec;
}

namespace {

bool segment_exists(sql::Connection& c, std::int64_t seg_id) {
  sql::Statement s(c, "SELECT 1 FROM tbl_Segmento WHERE seg_id = ?1");
  s.bind(1, seg_id);
  return s.step();
}

std::int64_t location_count(sql::Connection& c, std::int64_t seg_id) {
  sql::Statement s(c, "SELECT COUNT(*) FROM tbl_Location WHERE seg_id = ?1");
  s.bind(1, seg_id);
  s.step();
  return s.column_int(0);
}

void set_uploaded(sql::Connection& c, std::int64_t seg_id) {
  sql::Statement s(c, "UPDATE tbl_Segmento SET seg_subido = ?1 WHERE seg_id = ?2");
  s.bind(1, kUploaded).bind(2, seg_id);
  s.step();
}

}  // namespace

std::size_t Store::insert_locations(std::int64_t seg_id, std::span<const NewLocation> locations) {
  std::lock_guard lock(impl_->write_mu);
  auto& w = impl_->writer;
  sql::Transaction tx(w);
  if (!segment_exists(w, seg_id)) throw StoreError("no such segment");
  if (locations.empty()) {
    tx.commit();
    return 0;
  }
  const auto before = location_count(w, seg_id);
  sql::Statement st(w,
                    "INSERT INTO tbl_Location (loc_power, seg_id, loc_latitude, loc_longitude, loc_time, loc_date) "
                    "VALUES (?1, ?2, ?3, ?4, ?5, ?6)");
  for (const auto& l : locations) {
    st.bind(1, l.power).bind(2, seg_id).bind(3, l.latitude).bind(4, l.longitude).bind(5, l.time).bind(6, l.date);
    st.step();
    st.reset();
  }
  if (location_count(w, seg_id) - before != static_cast<std::int64_t>(locations.size())) {
    throw StoreError("location count mismatch");
  }
  set_uploaded(w, seg_id);
  tx.commit();
  return locations.size();
}

bool Store::mark_uploaded(std::int64_t seg_id, std::size_t expected_count) {
  std::lock_guard lock(impl_->write_mu);
  auto& w = impl_->writer;
  sql::Transaction tx(w);
  if (!segment_exists(w, seg_id)) throw StoreError("no such segment");
  if (expected_count == 0 || location_count(w, seg_id) != static_cast<std::int64_t>(expected_count)) return false;
  set_uploaded(w, seg_id);
  tx.commit();
  return true;
}

std::optional<SegmentRecord> Store::find_segment(std::int64_t seg_id) const {
  return impl_->read(path_, [&](sql::Connection& c) -> std::optional<SegmentRecord> {
    sql::Statement s(c, "SELECT " + std::string(kSegmentColumns) + " FROM tbl_Segmento WHERE seg_id = ?1");
    s.bind(1, seg_id);
    if (!s.step()) return std::nullopt;
    return read_segment(s);
  });
}

std::vector<SegmentRecord> Store::segments_of(std::string_view usu_hash) const {
  return impl_->read(path_, [&](sql::Connection& c) {
    sql::Statement s(c, "SELECT " + std::string(kSegmentColumns) +
                            " FROM tbl_Segmento WHERE usu_hash = ?1 ORDER BY seg_id");
    s.bind(1, usu_hash);
    std::vector<SegmentRecord> out;
    while (s.step()) out.push_back(read_segment(s));
    return out;
  });
}

std::vector<LocationRecord> Store::locations_of(std::int64_t seg_id) const {
  return impl_->read(path_, [&](sql::Connection& c) {
    sql::Statement s(c, "SELECT " + std::string(kLocationColumns) +
                            " FROM tbl_Location WHERE seg_id = ?1 ORDER BY loc_id");
    s.bind(1, seg_id);
    std::vector<LocationRecord> out;
    while (s.step()) out.push_back(read_location(s));
    return out;
  });
}

std::vector<QueryRow> Store::query_locations(const LocationFilter& f, int reference_year) const {
  if (f.age_min > f.age_max || f.from > f.to) throw StoreError("invalid range");
  const bool all = f.activity == kAllActivities;
  std::string q =
      "SELECT a.loc_latitude, a.loc_longitude, a.loc_time, a.loc_date, b.seg_activity, b.seg_id, a.loc_id "
      "FROM tbl_Location a "
      "JOIN tbl_Segmento b ON a.seg_id = b.seg_id "
      "JOIN tbl_usuarios d ON b.usu_hash = d.usu_hash "
      "WHERE (?1 - CAST(substr(d.usu_nacimiento, 1, 4) AS INTEGER)) BETWEEN ?2 AND ?3 "
      "AND (a.loc_date || ' ' || a.loc_time) BETWEEN ?4 AND ?5 ";
  if (!all) q += "AND b.seg_activity = ?6 ";
  q += "ORDER BY b.seg_id, a.loc_id";

  return impl_->read(path_, [&](sql::Connection& c) {
    sql::Statement s(c, q);
    s.bind(1, reference_year).bind(2, f.age_min).bind(3, f.age_max).bind(4, f.from.to_string()).bind(5, f.to.to_string());
    if (!all) s.bind(6, f.activity);
    std::vector<QueryRow> out;
    while (s.step()) {
      out.push_back({s.column_double(0), s.column_double(1), s.column_text(2), s.column_text(3), s.column_text(4),
                     s.column_int(5), s.column_int(6)});
    }
    return out;
  });
}

std::vector<QueryRow> Store::query_locations(const LocationFilter& filter) const {
  return query_locations(filter, CivilDate::today_utc().year);
}

std::vector<std::string> Store::distinct_activities() const {
  return impl_->read(path_, [&](sql::Connection& c) {
    sql::Statement s(c, "SELECT DISTINCT seg_activity FROM tbl_Segmento ORDER BY seg_activity");
    std::vector<std::string> out;
    while (s.step()) out.push_back(s.column_text(0));
    return out;
  });
}

namespace {

std::int64_t count_of(sql::Connection& c, std::string_view table) {
  sql::Statement s(c, "SELECT COUNT(*) FROM " + std::string(table));
  s.step();
  return s.column_int(0);
}

}  // namespace

std::int64_t Store::count_users() const {
  return impl_->read(path_, [](sql::Connection& c) { return count_of(c, "tbl_usuarios"); });
}
std::int64_t Store::count_segments() const {
  return impl_->read(path_, [](sql::Connection& c) { return count_of(c, "tbl_Segmento"); });
}
std::int64_t Store::count_locations() const {
  return impl_->read(path_, [](sql::Connection& c) { return count_of(c, "tbl_Location"); });
}

std::int64_t store_segment(Store& store, std::string_view owner_hash, const Segment& segment, const CivilDate& date) {
  std::vector<NewLocation> rows;
  rows.reserve(segment.locations.size());
  CivilDate day = date;
  for (std::size_t i = 0; i < segment.locations.size(); ++i) {
    const auto& l = segment.locations[i];
    if (i > 0 && l.time < segment.locations[i - 1].time) day = day.next_day();
    rows.push_back({l.power ? to_string(*l.power) : std::string(), l.point.lat, l.point.lon, l.time.to_string(),
                    day.to_string()});
  }
  const DateTime first{date, segment.first_time};
  const DateTime last{day, segment.last_time};
  const auto rec =
      store.insert_segment(owner_hash, segment.metrics(), to_string(segment.activity), first, last);
  store.insert_locations(rec.seg_id, rows);
  return rec.seg_id;
}

std::vector<std::int64_t> load_segment_text(Store& store, std::string_view owner_hash, std::string_view text,
                                            const CivilDate& date) {
  if (!store.find_user(owner_hash)) store.upsert_user(owner_hash, "");
  std::vector<std::int64_t> ids;
  for (const auto& parsed : parse_segments(text)) ids.push_back(store_segment(store, owner_hash, parsed.segment, date));
  return ids;
}

std::vector<std::int64_t> load_segment_file(Store& store, std::string_view owner_hash,
                                            const std::filesystem::path& path, const CivilDate& date) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StoreError("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return load_segment_text(store, owner_hash, os.str(), date);
}

}  // namespace mobility::store
