// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "provabs/optimizer.hpp"
#include "provabs/polynomial.hpp"
#include "provabs/tree.hpp"
#include "provabs/valuation.hpp"

namespace httplib {
class Server;
}

namespace provabs {

/// Failure that maps onto an HTTP status and the JSON error envelope
/// `{"error":{"code":..., "message":..., "details":[...]}}`.
class ApiError : public std::runtime_error {
 public:
  ApiError(int status, std::string code, const std::string& message, std::vector<std::string> details = {})
      : std::runtime_error(message), status_(status), code_(std::move(code)), details_(std::move(details)) {}

  int status() const noexcept { return status_; }
  const std::string& code() const noexcept { return code_; }
  const std::vector<std::string>& details() const noexcept { return details_; }

  nlohmann::json to_json() const;

 private:
  int status_;
  std::string code_;
  std::vector<std::string> details_;
};

/// State of one analyst session. Members are immutable once published, so
/// readers copy the pointers and evaluate without holding the session lock.
struct Session {
  std::shared_ptr<const ProvenanceBundle> bundle;
  std::shared_ptr<const AbstractionTree> tree;
  Valuation baseline{1.0};
  std::shared_ptr<const std::map<std::string, double>> baseline_values;
  std::shared_ptr<const AbstractionResult> result;
};

/// Session-oriented front of the library, independent of the transport.
/// Every method throws ApiError; library errors are translated to 422.
class Service {
 public:
  Service();

  std::string create_session();
  bool has_session(const std::string& id) const;

  nlohmann::json put_provenance(const std::string& id, ProvenanceBundle bundle);
  nlohmann::json put_tree(const std::string& id, AbstractionTree tree);
  nlohmann::json put_baseline(const std::string& id, Valuation baseline);

  /// Runs the optimizer and returns the result plus the assignment screen.
  nlohmann::json compress(const std::string& id, std::size_t bound);

  /// `{"assignments":{...}, "target":"full|compressed|both"}`.
  nlohmann::json evaluate(const std::string& id, const nlohmann::json& request);

  nlohmann::json metavars(const std::string& id) const;
  nlohmann::json diagnostics(const std::string& id) const;
  nlohmann::json baseline_results(const std::string& id) const;

  nlohmann::json snapshot() const;
  void restore(const nlohmann::json& snapshot);
  void save(const std::filesystem::path& path) const;
  void load(const std::filesystem::path& path);

 private:
  struct Slot {
    mutable std::mutex mutex;
    Session state;
    std::optional<std::size_t> bound;  // of the current result
  };

  std::shared_ptr<Slot> slot(const std::string& id) const;
  Session read(const std::string& id) const;

  mutable std::shared_mutex sessions_mutex_;
  mutable std::mutex save_mutex_;
  std::unordered_map<std::string, std::shared_ptr<Slot>> sessions_;
  std::uint64_t id_state_;
};

struct ServerOptions {
  std::optional<std::filesystem::path> static_dir;
  std::optional<std::filesystem::path> snapshot;  // rewritten after every mutation
};

/// Registers the `/api/sessions...` routes (and static files under `/`).
void mount_routes(httplib::Server& server, Service& service, const ServerOptions& options = {});

}  // namespace provabs
