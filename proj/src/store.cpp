#include "gg/store.hpp"

#include <algorithm>
#include <cctype>
#include <condition_variable>
#include <mutex>

#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/rand.h>
#include <sqlite3.h>

#include "gg/error.hpp"
#include "gg/model_document.hpp"

namespace gg {

namespace {

constexpr std::size_t kReadConnections = 4;

std::string to_hex(const unsigned char* data, std::size_t n) {
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(n * 2);
  for (std::size_t i = 0; i < n; ++i) {
    out += hex[data[i] >> 4];
    out += hex[data[i] & 0xF];
  }
  return out;
}

std::optional<std::vector<unsigned char>> from_hex(std::string_view s) {
  if (s.size() % 2) return std::nullopt;
  std::vector<unsigned char> out;
  for (std::size_t i = 0; i < s.size(); i += 2) {
    auto nibble = [](char c) -> int {
      if (c >= '0' && c <= '9') return c - '0';
      if (c >= 'a' && c <= 'f') return c - 'a' + 10;
      return -1;
    };
    const int hi = nibble(s[i]);
    const int lo = nibble(s[i + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    out.push_back(static_cast<unsigned char>(hi * 16 + lo));
  }
  return out;
}

std::string random_hex(std::size_t bytes) {
  std::vector<unsigned char> buf(bytes);
  if (RAND_bytes(buf.data(), static_cast<int>(buf.size())) != 1) throw Error(Errc::StoreFailure, "RAND_bytes failed");
  return to_hex(buf.data(), buf.size());
}

std::vector<unsigned char> pbkdf2(std::string_view password, const std::vector<unsigned char>& salt, int iterations) {
  std::vector<unsigned char> out(32);
  if (PKCS5_PBKDF2_HMAC(password.data(), static_cast<int>(password.size()), salt.data(), static_cast<int>(salt.size()),
                        iterations, EVP_sha256(), static_cast<int>(out.size()), out.data()) != 1)
    throw Error(Errc::StoreFailure, "PBKDF2 failed");
  return out;
}

std::string normalize_email(std::string_view email) {
  const auto first = email.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  email = email.substr(first, email.find_last_not_of(" \t") - first + 1);
  std::string out(email);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

bool plausible_email(std::string_view e) {
  const auto at = e.find('@');
  if (at == std::string_view::npos || at == 0 || e.find('@', at + 1) != std::string_view::npos) return false;
  const auto domain = e.substr(at + 1);
  const auto dot = domain.find('.');
  if (dot == std::string_view::npos || dot == 0 || dot + 1 == domain.size()) return false;
  return std::none_of(e.begin(), e.end(), [](unsigned char c) { return std::isspace(c) || std::iscntrl(c); });
}

// ---- thin RAII layer over sqlite3 -------------------------------------------

struct DbCloser {
  void operator()(sqlite3* db) const noexcept { sqlite3_close_v2(db); }
};
using DbHandle = std::unique_ptr<sqlite3, DbCloser>;

[[noreturn]] void fail(sqlite3* db, const std::string& what) {
  throw Error(Errc::StoreFailure, what + ": " + (db ? sqlite3_errmsg(db) : "no connection"));
}

class Statement {
 public:
  Statement(sqlite3* db, std::string_view sql) : db_(db) {
    if (sqlite3_prepare_v2(db, sql.data(), static_cast<int>(sql.size()), &stmt_, nullptr) != SQLITE_OK)
      fail(db, "prepare");
  }
  ~Statement() { sqlite3_finalize(stmt_); }
  Statement(const Statement&) = delete;
  Statement& operator=(const Statement&) = delete;

  Statement& bind(int i, std::string_view s) {
    sqlite3_bind_text(stmt_, i, s.data(), static_cast<int>(s.size()), SQLITE_TRANSIENT);
    return *this;
  }
  Statement& bind(int i, std::int64_t v) {
    sqlite3_bind_int64(stmt_, i, v);
    return *this;
  }
  Statement& bind(int i, double v) {
    sqlite3_bind_double(stmt_, i, v);
    return *this;
  }

  /// true while rows are available
  bool step() {
    const int rc = sqlite3_step(stmt_);
    if (rc == SQLITE_ROW) return true;
    if (rc == SQLITE_DONE) return false;
    last_rc_ = rc;
    if ((rc & 0xFF) == SQLITE_CONSTRAINT) throw Error(Errc::DuplicateEmail, sqlite3_errmsg(db_));
    fail(db_, "step");
  }

  std::string text(int col) const {
    const auto* p = sqlite3_column_text(stmt_, col);
    return p ? std::string(reinterpret_cast<const char*>(p), static_cast<std::size_t>(sqlite3_column_bytes(stmt_, col)))
             : std::string{};
  }
  std::int64_t integer(int col) const { return sqlite3_column_int64(stmt_, col); }
  double real(int col) const { return sqlite3_column_double(stmt_, col); }

 private:
  sqlite3* db_;
  sqlite3_stmt* stmt_ = nullptr;
  int last_rc_ = SQLITE_OK;
};

void exec(sqlite3* db, const char* sql) {
  char* err = nullptr;
  if (sqlite3_exec(db, sql, nullptr, nullptr, &err) != SQLITE_OK) {
    std::string msg = err ? err : "unknown";
    sqlite3_free(err);
    throw Error(Errc::StoreFailure, std::string("exec: ") + msg);
  }
}

DbHandle open_db(const std::string& path, bool read_only) {
  sqlite3* raw = nullptr;
  const int flags = (read_only ? SQLITE_OPEN_READONLY : SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE) |
                    SQLITE_OPEN_NOMUTEX;
  if (sqlite3_open_v2(path.c_str(), &raw, flags, nullptr) != SQLITE_OK) {
    DbHandle h(raw);
    fail(raw, "open '" + path + "'");
  }
  DbHandle db(raw);
  sqlite3_busy_timeout(db.get(), 5000);
  return db;
}

constexpr const char* kSchemaSql = R"sql(
PRAGMA journal_mode=WAL;
PRAGMA synchronous=FULL;
PRAGMA foreign_keys=ON;
CREATE TABLE IF NOT EXISTS models (
  model_id TEXT PRIMARY KEY,
  algorithm TEXT NOT NULL,
  document TEXT NOT NULL,
  created_at INTEGER NOT NULL,
  seq INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS accounts (
  account_id TEXT PRIMARY KEY,
  name TEXT NOT NULL,
  gender TEXT NOT NULL,
  branch TEXT NOT NULL,
  email TEXT NOT NULL UNIQUE,
  password_digest TEXT NOT NULL,
  created_at INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS sessions (
  token_hash TEXT PRIMARY KEY,
  account_id TEXT NOT NULL REFERENCES accounts(account_id),
  expires_at INTEGER NOT NULL,
  revoked INTEGER NOT NULL DEFAULT 0
);
CREATE TABLE IF NOT EXISTS history (
  entry_id TEXT PRIMARY KEY,
  account_id TEXT NOT NULL REFERENCES accounts(account_id),
  app_id TEXT NOT NULL,
  name TEXT NOT NULL,
  gender TEXT NOT NULL,
  percent_raw REAL NOT NULL,
  merit_raw REAL NOT NULL,
  admission_type_raw TEXT NOT NULL,
  algorithm TEXT NOT NULL,
  predicted TEXT NOT NULL,
  created_at INTEGER NOT NULL,
  seq INTEGER NOT NULL
);
CREATE INDEX IF NOT EXISTS history_by_account ON history(account_id, created_at, seq);
CREATE TABLE IF NOT EXISTS datasets (
  dataset_id TEXT PRIMARY KEY,
  account_id TEXT NOT NULL REFERENCES accounts(account_id),
  name TEXT NOT NULL,
  csv TEXT NOT NULL,
  created_at INTEGER NOT NULL
);
)sql";

std::int64_t to_ms(std::chrono::system_clock::time_point t) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(t.time_since_epoch()).count();
}

Gender gender_of(const std::string& s) {
  auto g = parse_gender(s);
  if (!g) throw Error(Errc::CorruptDocument, "stored gender '" + s + "' is invalid");
  return *g;
}

}  // namespace

std::string hash_password(std::string_view password, int iterations) {
  std::vector<unsigned char> salt(16);
  if (RAND_bytes(salt.data(), static_cast<int>(salt.size())) != 1) throw Error(Errc::StoreFailure, "RAND_bytes failed");
  const auto digest = pbkdf2(password, salt, iterations);
  return "pbkdf2_sha256$" + std::to_string(iterations) + "$" + to_hex(salt.data(), salt.size()) + "$" +
         to_hex(digest.data(), digest.size());
}

bool verify_password(std::string_view password, std::string_view digest) {
  // pbkdf2_sha256$<iterations>$<salt>$<hash>
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = digest.find('$', start);
    parts.push_back(digest.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  if (parts.size() != 4 || parts[0] != "pbkdf2_sha256") return false;
  int iterations = 0;
  try {
    iterations = std::stoi(std::string(parts[1]));
  } catch (...) {
    return false;
  }
  const auto salt = from_hex(parts[2]);
  const auto expected = from_hex(parts[3]);
  if (!salt || !expected || iterations <= 0) return false;
  const auto actual = pbkdf2(password, *salt, iterations);
  return actual.size() == expected->size() && CRYPTO_memcmp(actual.data(), expected->data(), actual.size()) == 0;
}

class Store::Impl {
 public:
  explicit Impl(StoreOptions options) : options_(std::move(options)) {
    if (options_.path.empty()) throw Error(Errc::InvalidConfig, "store path is empty");
    if (options_.pbkdf2_iterations < 100000)
      throw Error(Errc::InvalidConfig, "password hashing needs at least 100000 iterations");
    writer_ = open_db(options_.path, false);
    exec(writer_.get(), kSchemaSql);
    for (std::size_t i = 0; i < kReadConnections; ++i) {
      auto db = open_db(options_.path, true);
      readers_.push_back(db.get());
      owned_readers_.push_back(std::move(db));
    }
  }

  const std::string& dummy_digest() {
    std::call_once(dummy_once_, [&] { dummy_digest_ = hash_password("not-a-real-password", options_.pbkdf2_iterations); });
    return dummy_digest_;
  }

  std::int64_t now() const { return to_ms(options_.clock()); }

  // Exclusive access to the write connection, inside a transaction.
  template <typename F>
  auto write(F&& f) {
    std::lock_guard lock(write_mutex_);
    exec(writer_.get(), "BEGIN IMMEDIATE");
    try {
      if constexpr (std::is_void_v<decltype(f(writer_.get()))>) {
        f(writer_.get());
        exec(writer_.get(), "COMMIT");
      } else {
        auto result = f(writer_.get());
        exec(writer_.get(), "COMMIT");
        return result;
      }
    } catch (...) {
      sqlite3_exec(writer_.get(), "ROLLBACK", nullptr, nullptr, nullptr);
      throw;
    }
  }

  template <typename F>
  auto read(F&& f) const {
    sqlite3* db = nullptr;
    {
      std::unique_lock lock(pool_mutex_);
      pool_cv_.wait(lock, [&] { return !readers_.empty(); });
      db = readers_.back();
      readers_.pop_back();
    }
    struct Release {
      const Impl* self;
      sqlite3* db;
      ~Release() {
        {
          std::lock_guard lock(self->pool_mutex_);
          self->readers_.push_back(db);
        }
        self->pool_cv_.notify_one();
      }
    } release{this, db};
    return f(db);
  }

  std::int64_t next_seq(sqlite3* db, const char* table) {
    Statement s(db, std::string("SELECT COALESCE(MAX(seq), 0) + 1 FROM ") + table);
    s.step();
    return s.integer(0);
  }

  StoreOptions options_;
  DbHandle writer_;
  std::vector<DbHandle> owned_readers_;
  mutable std::vector<sqlite3*> readers_;
  mutable std::mutex pool_mutex_;
  mutable std::condition_variable pool_cv_;
  std::mutex write_mutex_;
  std::once_flag dummy_once_;
  std::string dummy_digest_;
};

Store::Store(StoreOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}
Store::~Store() = default;

// ---- models ---------------------------------------------------------------

std::string Store::save_model(const TrainedModel& model, std::optional<std::string> model_id) {
  const auto id = model_id.value_or(random_hex(8));
  if (id.empty()) throw Error(Errc::InvalidConfig, "empty model id");
  const auto document = serialize_model(model);
  impl_->write([&](sqlite3* db) {
    const auto seq = impl_->next_seq(db, "models");
    Statement s(db, "INSERT OR REPLACE INTO models(model_id, algorithm, document, created_at, seq) VALUES(?,?,?,?,?)");
    s.bind(1, id).bind(2, to_string(model.algorithm)).bind(3, document).bind(4, impl_->now()).bind(5, seq);
    s.step();
  });
  return id;
}

std::string Store::load_model_document(std::string_view model_id) const {
  return impl_->read([&](sqlite3* db) {
    Statement s(db, "SELECT document FROM models WHERE model_id = ?");
    s.bind(1, model_id);
    if (!s.step()) throw Error(Errc::NotFound, "no model '" + std::string(model_id) + "'");
    return s.text(0);
  });
}

TrainedModel Store::load_model(std::string_view model_id) const {
  return deserialize_model(load_model_document(model_id));
}

std::optional<std::string> Store::latest_model(Algorithm algorithm) const {
  return impl_->read([&](sqlite3* db) -> std::optional<std::string> {
    Statement s(db, "SELECT model_id FROM models WHERE algorithm = ? ORDER BY seq DESC LIMIT 1");
    s.bind(1, to_string(algorithm));
    if (!s.step()) return std::nullopt;
    return s.text(0);
  });
}

std::vector<ModelInfo> Store::list_models() const {
  return impl_->read([&](sqlite3* db) {
    Statement s(db, "SELECT model_id, algorithm, created_at FROM models ORDER BY seq");
    std::vector<ModelInfo> out;
    while (s.step())
      out.push_back({s.text(0), parse_algorithm(s.text(1)).value_or(Algorithm::ID3), s.integer(2)});
    return out;
  });
}

// ---- accounts -------------------------------------------------------------

std::string Store::register_account(std::string_view name, Gender gender, std::string_view branch,
                                    std::string_view email, std::string_view password) {
  const auto normalized = normalize_email(email);
  if (!plausible_email(normalized)) throw Error(Errc::InvalidEmail, "'" + std::string(email) + "' is not an email");
  if (password.size() < 8) throw Error(Errc::WeakPassword, "password must have at least 8 characters");
  const auto digest = hash_password(password, impl_->options_.pbkdf2_iterations);
  const auto id = random_hex(8);
  impl_->write([&](sqlite3* db) {
    Statement s(db,
                "INSERT INTO accounts(account_id, name, gender, branch, email, password_digest, created_at) "
                "VALUES(?,?,?,?,?,?,?)");
    s.bind(1, id).bind(2, name).bind(3, to_string(gender)).bind(4, branch).bind(5, normalized).bind(6, digest);
    s.bind(7, impl_->now());
    try {
      s.step();
    } catch (const Error& e) {
      if (e.code() == Errc::DuplicateEmail)
        throw Error(Errc::DuplicateEmail, "email '" + normalized + "' is already registered");
      throw;
    }
  });
  return id;
}

Session Store::authenticate(std::string_view email, std::string_view password) {
  const auto normalized = normalize_email(email);
  auto found = impl_->read([&](sqlite3* db) -> std::optional<std::pair<std::string, std::string>> {
    Statement s(db, "SELECT account_id, password_digest FROM accounts WHERE email = ?");
    s.bind(1, normalized);
    if (!s.step()) return std::nullopt;
    return std::make_pair(s.text(0), s.text(1));
  });
  // hash even for unknown emails so both failures cost the same
  const bool ok = verify_password(password, found ? found->second : impl_->dummy_digest()) && found.has_value();
  if (!ok) throw Error(Errc::BadCredentials, "invalid email or password");

  Session session{random_hex(32), found->first,
                  impl_->now() + std::chrono::duration_cast<std::chrono::milliseconds>(impl_->options_.session_ttl).count()};
  impl_->write([&](sqlite3* db) {
    Statement s(db, "INSERT INTO sessions(token_hash, account_id, expires_at) VALUES(?,?,?)");
    s.bind(1, sha256_hex(session.token)).bind(2, session.account_id).bind(3, session.expires_at_ms);
    s.step();
  });
  return session;
}

std::string Store::authorize(std::string_view token) const {
  if (token.empty()) throw Error(Errc::AuthRequired, "missing token");
  const auto hash = sha256_hex(token);
  const auto now = impl_->now();
  return impl_->read([&](sqlite3* db) {
    Statement s(db, "SELECT account_id, expires_at, revoked FROM sessions WHERE token_hash = ?");
    s.bind(1, hash);
    if (!s.step() || s.integer(2) != 0 || s.integer(1) <= now)
      throw Error(Errc::AuthRequired, "session is missing, revoked, or expired");
    return s.text(0);
  });
}

void Store::revoke(std::string_view token) {
  const auto hash = sha256_hex(token);
  impl_->write([&](sqlite3* db) {
    Statement s(db, "UPDATE sessions SET revoked = 1 WHERE token_hash = ?");
    s.bind(1, hash);
    s.step();
  });
}

StaffAccount Store::account(std::string_view account_id) const {
  return impl_->read([&](sqlite3* db) {
    Statement s(db,
                "SELECT account_id, name, gender, branch, email, password_digest, created_at FROM accounts "
                "WHERE account_id = ?");
    s.bind(1, account_id);
    if (!s.step()) throw Error(Errc::NotFound, "no account '" + std::string(account_id) + "'");
    return StaffAccount{s.text(0), s.text(1), gender_of(s.text(2)), s.text(3), s.text(4), s.text(5), s.integer(6)};
  });
}

// ---- history --------------------------------------------------------------

HistoryEntry Store::history_append(HistoryEntry entry) {
  if (entry.predicted != "pass" && entry.predicted != "fail")
    throw Error(Errc::DomainViolation, "history label must be pass or fail");
  entry.entry_id = random_hex(8);
  entry.created_at_ms = impl_->now();
  impl_->write([&](sqlite3* db) {
    {
      Statement owner(db, "SELECT 1 FROM accounts WHERE account_id = ?");
      owner.bind(1, entry.account_id);
      if (!owner.step()) throw Error(Errc::NotFound, "no account '" + entry.account_id + "'");
    }
    const auto seq = impl_->next_seq(db, "history");
    Statement s(db,
                "INSERT INTO history(entry_id, account_id, app_id, name, gender, percent_raw, merit_raw, "
                "admission_type_raw, algorithm, predicted, created_at, seq) VALUES(?,?,?,?,?,?,?,?,?,?,?,?)");
    s.bind(1, entry.entry_id).bind(2, entry.account_id).bind(3, entry.app_id).bind(4, entry.name);
    s.bind(5, to_string(entry.gender)).bind(6, entry.percent_raw).bind(7, entry.merit_raw);
    s.bind(8, entry.admission_type_raw).bind(9, to_string(entry.algorithm)).bind(10, entry.predicted);
    s.bind(11, entry.created_at_ms).bind(12, seq);
    s.step();
  });
  return entry;
}

std::vector<HistoryEntry> Store::history_list(std::string_view account_id) const {
  return impl_->read([&](sqlite3* db) {
    Statement s(db,
                "SELECT entry_id, account_id, app_id, name, gender, percent_raw, merit_raw, admission_type_raw, "
                "algorithm, predicted, created_at FROM history WHERE account_id = ? "
                "ORDER BY created_at DESC, seq DESC");
    s.bind(1, account_id);
    std::vector<HistoryEntry> out;
    while (s.step()) {
      out.push_back(HistoryEntry{s.text(0), s.text(1), s.text(2), s.text(3), gender_of(s.text(4)), s.real(5),
                                 s.real(6), s.text(7), parse_algorithm(s.text(8)).value_or(Algorithm::ID3), s.text(9),
                                 s.integer(10)});
    }
    return out;
  });
}

void Store::history_delete(std::string_view account_id, std::string_view entry_id) {
  impl_->write([&](sqlite3* db) {
    Statement owner(db, "SELECT account_id FROM history WHERE entry_id = ?");
    owner.bind(1, entry_id);
    if (!owner.step()) throw Error(Errc::NotFound, "no history entry '" + std::string(entry_id) + "'");
    if (owner.text(0) != account_id) throw Error(Errc::Forbidden, "history entry belongs to another account");
    Statement s(db, "DELETE FROM history WHERE entry_id = ? AND account_id = ?");
    s.bind(1, entry_id).bind(2, account_id);
    s.step();
  });
}

// ---- datasets -------------------------------------------------------------

std::string Store::save_dataset(std::string_view account_id, std::string_view name, std::string_view csv) {
  const auto id = random_hex(8);
  impl_->write([&](sqlite3* db) {
    Statement s(db, "INSERT INTO datasets(dataset_id, account_id, name, csv, created_at) VALUES(?,?,?,?,?)");
    s.bind(1, id).bind(2, account_id).bind(3, name).bind(4, csv).bind(5, impl_->now());
    s.step();
  });
  return id;
}

StoredDataset Store::load_dataset(std::string_view account_id, std::string_view dataset_id) const {
  return impl_->read([&](sqlite3* db) {
    Statement s(db, "SELECT dataset_id, account_id, name, csv, created_at FROM datasets WHERE dataset_id = ?");
    s.bind(1, dataset_id);
    if (!s.step()) throw Error(Errc::NotFound, "no dataset '" + std::string(dataset_id) + "'");
    StoredDataset d{s.text(0), s.text(1), s.text(2), s.text(3), s.integer(4)};
    if (d.account_id != account_id) throw Error(Errc::Forbidden, "dataset belongs to another account");
    return d;
  });
}

}  // namespace gg
