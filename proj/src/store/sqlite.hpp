#pragma once

// Thin RAII layer over the sqlite3 C API, private to the store.

#include <sqlite3.h>

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "mobility/store/store.hpp"

namespace mobility::store::sql {

struct DbClose {
  void operator()(sqlite3* db) const noexcept { sqlite3_close_v2(db); }
};
struct StmtFinalize {
  void operator()(sqlite3_stmt* s) const noexcept { sqlite3_finalize(s); }
};

class Connection {
 public:
  Connection(const std::string& path, int flags);

  void exec(std::string_view sql);
  [[nodiscard]] sqlite3* get() const noexcept { return db_.get(); }
  [[nodiscard]] std::int64_t last_insert_rowid() const noexcept { return sqlite3_last_insert_rowid(db_.get()); }
  [[nodiscard]] int changes() const noexcept { return sqlite3_changes(db_.get()); }

  [[noreturn]] void raise(std::string_view context) const;

 private:
  std::unique_ptr<sqlite3, DbClose> db_;
};

class Statement {
 public:
  Statement(Connection& conn, std::string_view sql);

  Statement& bind(int idx, std::int64_t v);
  Statement& bind(int idx, int v) { return bind(idx, static_cast<std::int64_t>(v)); }
  Statement& bind(int idx, double v);
  Statement& bind(int idx, std::string_view v);

  /// True while a row is available.
  bool step();
  void reset();

  [[nodiscard]] std::int64_t column_int(int col) const;
  [[nodiscard]] double column_double(int col) const;
  [[nodiscard]] std::string column_text(int col) const;

 private:
  Connection& conn_;
  std::unique_ptr<sqlite3_stmt, StmtFinalize> stmt_;
};

/// Rolls back unless commit() was called.
class Transaction {
 public:
  explicit Transaction(Connection& conn);
  Transaction(const Transaction&) = delete;
  Transaction& operator=(const Transaction&) = delete;
  ~Transaction();
  void commit();

 private:
  Connection& conn_;
  bool done_ = false;
};

}  // namespace mobility::store::sql
