#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gg/induction.hpp"
#include "gg/preprocess.hpp"

namespace gg {

using Clock = std::function<std::chrono::system_clock::time_point()>;

struct StoreOptions {
  /// SQLite database file; created on first use.
  std::string path;
  int pbkdf2_iterations = 100000;
  std::chrono::seconds session_ttl = std::chrono::hours(8);
  Clock clock = [] { return std::chrono::system_clock::now(); };
};

struct StaffAccount {
  std::string account_id;
  std::string name;
  Gender gender = Gender::Male;
  std::string branch;
  std::string email;
  /// "pbkdf2_sha256$<iterations>$<salt hex>$<digest hex>"
  std::string password_digest;
  std::int64_t created_at_ms = 0;
};

struct Session {
  std::string token;
  std::string account_id;
  std::int64_t expires_at_ms = 0;
};

struct HistoryEntry {
  std::string entry_id;
  std::string account_id;
  std::string app_id;
  std::string name;
  Gender gender = Gender::Male;
  double percent_raw = 0.0;
  double merit_raw = 0.0;
  std::string admission_type_raw;
  Algorithm algorithm = Algorithm::ID3;
  std::string predicted;
  std::int64_t created_at_ms = 0;
};

struct StoredDataset {
  std::string dataset_id;
  std::string account_id;
  std::string name;
  std::string csv;
  std::int64_t created_at_ms = 0;
};

struct ModelInfo {
  std::string model_id;
  Algorithm algorithm = Algorithm::ID3;
  std::int64_t created_at_ms = 0;
};

/// Embedded single-file store. Writes are serialized; reads run concurrently
/// on pooled read connections. Every method is safe to call from any thread.
class Store {
 public:
  explicit Store(StoreOptions options);
  ~Store();
  Store(const Store&) = delete;
  Store& operator=(const Store&) = delete;

  // models
  /// Saves under `model_id` (replacing it) or a fresh random id.
  std::string save_model(const TrainedModel& model, std::optional<std::string> model_id = std::nullopt);
  TrainedModel load_model(std::string_view model_id) const;
  std::string load_model_document(std::string_view model_id) const;
  std::optional<std::string> latest_model(Algorithm algorithm) const;
  std::vector<ModelInfo> list_models() const;

  // accounts and sessions
  std::string register_account(std::string_view name, Gender gender, std::string_view branch, std::string_view email,
                                std::string_view password);
  Session authenticate(std::string_view email, std::string_view password);
  /// Account id behind a live token; AuthRequired otherwise.
  std::string authorize(std::string_view token) const;
  void revoke(std::string_view token);
  StaffAccount account(std::string_view account_id) const;

  // singular-evaluation history
  /// Fills entry_id and created_at; durable when this returns.
  HistoryEntry history_append(HistoryEntry entry);
  std::vector<HistoryEntry> history_list(std::string_view account_id) const;
  void history_delete(std::string_view account_id, std::string_view entry_id);

  // uploaded datasets, private to their owner
  std::string save_dataset(std::string_view account_id, std::string_view name, std::string_view csv);
  StoredDataset load_dataset(std::string_view account_id, std::string_view dataset_id) const;

 private:
  class Impl;
  std::unique_ptr<Impl> impl_;
};

/// PBKDF2-HMAC-SHA256 digest in the StaffAccount format.
std::string hash_password(std::string_view password, int iterations);
bool verify_password(std::string_view password, std::string_view digest);

}  // namespace gg
