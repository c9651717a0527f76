#pragma once

#include <memory>

#include "gg/config.hpp"
#include "gg/error.hpp"
#include "gg/store.hpp"

namespace gg {

/// HTTP status for an error code: 400 validation, 401 auth, 403 ownership,
/// 404 missing id, 409 duplicate email, 500 store failure.
int http_status(Errc code) noexcept;

/// JSON API over the learning core and the store. Handlers share the store
/// and hold no other mutable state, so requests run fully concurrently.
class Service {
 public:
  Service(AppConfig config, std::shared_ptr<Store> store);
  /// Opens the store named by config.store_path.
  explicit Service(AppConfig config);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds config.bind_address; port 0 picks a free port. Returns the port.
  int bind();
  /// Serves until stop(). Call bind() first.
  void run();
  void stop();
  /// Blocks until run() is accepting connections.
  void wait_until_ready() const;

  Store& store() noexcept;
  const AppConfig& config() const noexcept;

 private:
  class Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace gg
