#include "gg/service.hpp"

#include <charconv>
#include <cmath>

#include <spdlog/spdlog.h>

#include "gg/error.hpp"
#include "gg/evaluation.hpp"
#include "gg/model_document.hpp"
#include "httplib.h"
#include "json.hpp"

namespace gg {

using json = nlohmann::json;

int http_status(Errc code) noexcept {
  switch (code) {
    case Errc::AuthRequired:
    case Errc::BadCredentials: return 401;
    case Errc::Forbidden: return 403;
    case Errc::NotFound: return 404;
    case Errc::DuplicateEmail: return 409;
    case Errc::StoreFailure: return 500;
    default: return 400;
  }
}

namespace {

[[noreturn]] void bad_request(const std::string& message) { throw Error(Errc::InvalidRequest, message); }

json parse_body(const httplib::Request& req) {
  json body = json::parse(req.body, nullptr, false);
  if (body.is_discarded() || !body.is_object()) bad_request("request body must be a JSON object");
  return body;
}

std::string required_string(const json& body, const char* field) {
  const auto it = body.find(field);
  if (it == body.end() || !it->is_string()) bad_request(std::string("field '") + field + "' must be a string");
  return it->get<std::string>();
}

std::optional<std::string> optional_string(const json& body, const char* field) {
  const auto it = body.find(field);
  if (it == body.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) bad_request(std::string("field '") + field + "' must be a string");
  return it->get<std::string>();
}

/// A JSON number or a numeric string.
double required_number(const json& body, const char* field) {
  const auto it = body.find(field);
  if (it != body.end() && it->is_number()) return it->get<double>();
  if (it != body.end() && it->is_string()) {
    const auto s = it->get<std::string>();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc{} && ptr == s.data() + s.size() && std::isfinite(v)) return v;
  }
  bad_request(std::string("field '") + field + "' must be a number");
}

json cell_json(const CellValue& v) {
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  if (const auto* d = std::get_if<double>(&v)) return *d;
  return nullptr;
}

json row_json(const Schema& schema, const Row& row) {
  json j = json::object();
  for (std::size_t a = 0; a < schema.size(); ++a) j[schema[a].name] = cell_json(row.cells[a]);
  return j;
}

json path_json(const std::vector<PathStep>& path) {
  json out = json::array();
  for (const auto& step : path) {
    json j{{"attribute", attribute_of(step.test)}, {"outcome", step.outcome}};
    if (const auto* c = std::get_if<ContinuousSplit>(&step.test)) j["threshold"] = c->threshold;
    out.push_back(std::move(j));
  }
  return out;
}

json stats_json(const TrainStats& s) {
  return json{{"training_rows", s.training_rows}, {"node_count", s.node_count}, {"leaf_count", s.leaf_count}};
}

json history_json(const HistoryEntry& e) {
  return json{{"entry_id", e.entry_id},
              {"app_id", e.app_id},
              {"name", e.name},
              {"gender", std::string(to_string(e.gender))},
              {"percent", e.percent_raw},
              {"merit", e.merit_raw},
              {"type", e.admission_type_raw},
              {"algorithm", std::string(to_string(e.algorithm))},
              {"predicted", e.predicted},
              {"created_at", e.created_at_ms}};
}

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view name, std::string_view message) {
  send_json(res, status, json{{"error", name}, {"message", message}});
}

std::string bearer_token(const httplib::Request& req) {
  const auto header = req.get_header_value("Authorization");
  constexpr std::string_view prefix = "Bearer ";
  if (header.size() <= prefix.size() || header.compare(0, prefix.size(), prefix) != 0)
    throw Error(Errc::AuthRequired, "missing bearer token");
  return header.substr(prefix.size());
}

}  // namespace

class Service::Impl {
 public:
  Impl(AppConfig config, std::shared_ptr<Store> store) : config_(std::move(config)), store_(std::move(store)) {
    config_.validate();
    spdlog::set_level(spdlog::level::from_str(config_.log_level));
    server_.set_payload_max_length(config_.upload_max_bytes);
    server_.set_error_handler([](const httplib::Request&, httplib::Response& res) {
      if (!res.body.empty()) return;
      if (res.status == 413)
        send_error(res, 413, "PayloadTooLarge", "request body exceeds the upload limit");
      else if (res.status == 404)
        send_error(res, 404, "NotFound", "no such route");
      else
        send_error(res, res.status, "HttpError", httplib::status_message(res.status));
    });
    server_.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
      try {
        std::rethrow_exception(ep);
      } catch (const Error& e) {
        send_error(res, http_status(e.code()), e.name(), e.what());
      } catch (const std::exception& e) {
        spdlog::error("unhandled exception: {}", e.what());
        send_error(res, 500, "InternalError", "internal error");
      }
    });
    server_.set_logger([](const httplib::Request& req, const httplib::Response& res) {
      spdlog::info("{} {} -> {}", req.method, req.path, res.status);
    });
    routes();
  }

  std::string authorize(const httplib::Request& req) const { return store_->authorize(bearer_token(req)); }

  TrainedModel resolve_model(const json& body, std::string& model_id) const {
    if (auto id = optional_string(body, "model_id")) {
      model_id = *id;
    } else if (auto name = optional_string(body, "algorithm")) {
      const auto algorithm = parse_algorithm(*name);
      if (!algorithm) bad_request("unknown algorithm '" + *name + "'");
      auto latest = store_->latest_model(*algorithm);
      if (!latest) throw Error(Errc::NotFound, "no trained " + std::string(to_string(*algorithm)) + " model");
      model_id = *latest;
    } else {
      bad_request("either 'model_id' or 'algorithm' is required");
    }
    return store_->load_model(model_id);
  }

  Dataset load_dataset(const std::string& account, const json& body) const {
    const auto stored = store_->load_dataset(account, required_string(body, "dataset_id"));
    return parse_student_csv(stored.csv);
  }

  void routes() {
    server_.Post("/api/register", [this](const httplib::Request& req, httplib::Response& res) {
      const auto body = parse_body(req);
      const auto password = required_string(body, "password");
      if (auto confirm = optional_string(body, "password_confirm"); confirm && *confirm != password)
        bad_request("password and password_confirm differ");
      const auto gender = parse_gender(required_string(body, "gender"));
      if (!gender) bad_request("gender must be Male or Female");
      const auto id = store_->register_account(required_string(body, "name"), *gender,
                                               optional_string(body, "branch").value_or(""),
                                               required_string(body, "email"), password);
      send_json(res, 201, json{{"account_id", id}});
    });

    server_.Post("/api/login", [this](const httplib::Request& req, httplib::Response& res) {
      const auto body = parse_body(req);
      const auto session = store_->authenticate(required_string(body, "email"), required_string(body, "password"));
      send_json(res, 200,
                json{{"token", session.token}, {"account_id", session.account_id},
                     {"expires_at", session.expires_at_ms}});
    });

    server_.Post("/api/logout", [this](const httplib::Request& req, httplib::Response& res) {
      authorize(req);
      store_->revoke(bearer_token(req));
      res.status = 204;
    });

    server_.Post("/api/datasets", [this](const httplib::Request& req, httplib::Response& res) {
      const auto account = authorize(req);
      if (!req.has_file("file")) bad_request("multipart field 'file' is required");
      const auto file = req.get_file_value("file");
      const auto name = req.has_file("name") ? req.get_file_value("name").content : file.filename;
      const auto layout = detect_layout(file.content);
      const auto parsed = parse_student_csv(file.content);
      const auto id = store_->save_dataset(account, name, file.content);
      send_json(res, 201,
                json{{"dataset_id", id},
                     {"name", name},
                     {"layout", layout == CsvLayout::Raw ? "raw" : "processed"},
                     {"rows", parsed.size()}});
    });

    server_.Post("/api/models", [this](const httplib::Request& req, httplib::Response& res) {
      const auto account = authorize(req);
      const auto body = parse_body(req);
      const auto algorithm = parse_algorithm(required_string(body, "algorithm"));
      if (!algorithm) bad_request("algorithm must be ID3 or C45");
      auto config = config_.train_defaults(*algorithm);
      if (const auto it = body.find("config"); it != body.end() && !it->is_null()) {
        if (!it->is_object()) bad_request("'config' must be an object");
        try {
          if (it->contains("min_leaf_size")) config.min_leaf_size = it->at("min_leaf_size").get<std::size_t>();
          if (it->contains("prune")) config.prune = it->at("prune").get<bool>();
          if (it->contains("confidence_factor")) config.confidence_factor = it->at("confidence_factor").get<double>();
        } catch (const json::exception& e) {
          bad_request(std::string("bad config override: ") + e.what());
        }
      }
      auto data = load_dataset(account, body);
      std::size_t dropped = 0;
      if (data.schema() == raw_student_schema()) {
        auto processed = preprocess_detailed(data, {config_.thresholds, true});
        dropped = processed.dropped.size();
        data = std::move(processed.dataset);
      } else {
        auto cleaned = clean(data);
        dropped = cleaned.dropped.size();
        data = std::move(cleaned.dataset);
      }
      const auto model = train(*algorithm, data, processed_feature_names(), config);
      const auto id = store_->save_model(model);
      send_json(res, 201,
                json{{"model_id", id},
                     {"algorithm", std::string(to_string(model.algorithm))},
                     {"stats", stats_json(model.stats)},
                     {"dropped_rows", dropped}});
    });

    server_.Get("/api/models", [this](const httplib::Request& req, httplib::Response& res) {
      authorize(req);
      json out = json::array();
      for (const auto& m : store_->list_models())
        out.push_back(json{{"model_id", m.model_id},
                           {"algorithm", std::string(to_string(m.algorithm))},
                           {"created_at", m.created_at_ms}});
      send_json(res, 200, json{{"models", out}});
    });

    server_.Post("/api/predict", [this](const httplib::Request& req, httplib::Response& res) {
      const auto account = authorize(req);
      const auto body = parse_body(req);
      std::string model_id;
      const auto model = resolve_model(body, model_id);

      RawStudentRecord raw;
      raw.name = required_string(body, "name");
      raw.app_id = required_string(body, "app_id");
      const auto gender = parse_gender(required_string(body, "gender"));
      if (!gender) bad_request("gender must be Male or Female");
      raw.gender = *gender;
      raw.percent = required_number(body, "percent");
      raw.merit_marks = required_number(body, "merit");
      raw.admission_type_code = required_string(body, "type");
      const auto processed = preprocess_record(raw, config_.thresholds);
      const auto prediction = predict_single(model, processed, model_id, raw.app_id);

      HistoryEntry entry;
      entry.account_id = account;
      entry.app_id = raw.app_id;
      entry.name = raw.name;
      entry.gender = raw.gender;
      entry.percent_raw = raw.percent;
      entry.merit_raw = raw.merit_marks;
      entry.admission_type_raw = raw.admission_type_code;
      entry.algorithm = model.algorithm;
      entry.predicted = prediction.predicted;
      entry = store_->history_append(std::move(entry));

      send_json(res, 200,
                json{{"predicted", prediction.predicted},
                     {"model_id", model_id},
                     {"algorithm", std::string(to_string(model.algorithm))},
                     {"inputs",
                      {{"merit", std::string(to_string(processed.merit))},
                       {"gender", std::string(to_string(processed.gender))},
                       {"percent", std::string(to_string(processed.percent))},
                       {"type", std::string(to_string(processed.type))}}},
                     {"path", path_json(prediction.path)},
                     {"history", history_json(entry)}});
    });

    server_.Post("/api/evaluate", [this](const httplib::Request& req, httplib::Response& res) {
      const auto account = authorize(req);
      const auto body = parse_body(req);
      std::string model_id;
      const auto model = resolve_model(body, model_id);
      const auto data = load_dataset(account, body);
      const auto result = evaluate_bulk(model, data, {config_.thresholds, Execution::Parallel, model_id});
      json rows = json::array();
      for (const auto& p : result.predictions)
        rows.push_back(json{{"row", p.row},
                            {"record_ref", p.record_ref},
                            {"record", row_json(data.schema(), data.rows()[p.row])},
                            {"predicted", p.predicted}});
      json skipped = json::array();
      for (const auto& s : result.skipped) skipped.push_back(json{{"row", s.row}, {"reason", s.reason}});
      send_json(res, 200,
                json{{"model_id", model_id},
                     {"algorithm", std::string(to_string(model.algorithm))},
                     {"wall_ms", result.wall_time_ms},
                     {"predictions", rows},
                     {"skipped", skipped}});
    });

    server_.Post("/api/verify", [this](const httplib::Request& req, httplib::Response& res) {
      const auto account = authorize(req);
      const auto body = parse_body(req);
      std::string model_id;
      const auto model = resolve_model(body, model_id);
      const auto data = load_dataset(account, body);
      const auto report = verify(model, data, {config_.thresholds, Execution::Parallel, model_id});
      json mismatches = json::array();
      for (const auto& m : report.mismatches)
        mismatches.push_back(json{{"row", m.row},
                                  {"record_ref", m.record_ref},
                                  {"record", row_json(data.schema(), m.record)},
                                  {"actual", m.actual},
                                  {"predicted", m.predicted}});
      send_json(res, 200,
                json{{"model_id", model_id},
                     {"algorithm", std::string(to_string(model.algorithm))},
                     {"total", report.total},
                     {"correct", report.correct},
                     {"accuracy", report.accuracy_percent},
                     {"accuracy_text", format_percent(report.accuracy_percent)},
                     {"wall_ms", report.wall_time_ms},
                     {"mismatches", mismatches}});
    });

    server_.Get("/api/history", [this](const httplib::Request& req, httplib::Response& res) {
      const auto account = authorize(req);
      json entries = json::array();
      for (const auto& e : store_->history_list(account)) entries.push_back(history_json(e));
      send_json(res, 200, json{{"entries", entries}});
    });

    server_.Delete(R"(/api/history/([0-9A-Za-z_-]+))", [this](const httplib::Request& req, httplib::Response& res) {
      const auto account = authorize(req);
      store_->history_delete(account, req.matches[1].str());
      res.status = 204;
    });
  }

  AppConfig config_;
  std::shared_ptr<Store> store_;
  httplib::Server server_;
};

namespace {

std::shared_ptr<Store> open_store(const AppConfig& config) {
  StoreOptions options;
  options.path = config.store_path;
  options.pbkdf2_iterations = config.pbkdf2_iterations;
  options.session_ttl = std::chrono::seconds(config.session_ttl_seconds);
  return std::make_shared<Store>(std::move(options));
}

}  // namespace

Service::Service(AppConfig config, std::shared_ptr<Store> store)
    : impl_(std::make_unique<Impl>(std::move(config), std::move(store))) {}

Service::Service(AppConfig config) : Service(config, open_store(config)) {}

Service::~Service() = default;

int Service::bind() {
  const int port = impl_->config_.port == 0 ? impl_->server_.bind_to_any_port(impl_->config_.bind_address)
                                            : (impl_->server_.bind_to_port(impl_->config_.bind_address,
                                                                           impl_->config_.port)
                                                   ? impl_->config_.port
                                                   : -1);
  if (port < 0)
    throw Error(Errc::InvalidConfig, "cannot bind " + impl_->config_.bind_address + ":" +
                                         std::to_string(impl_->config_.port));
  return port;
}

void Service::run() { impl_->server_.listen_after_bind(); }
void Service::stop() { impl_->server_.stop(); }
void Service::wait_until_ready() const { impl_->server_.wait_until_ready(); }
Store& Service::store() noexcept { return *impl_->store_; }
const AppConfig& Service::config() const noexcept { return impl_->config_; }

}  // namespace gg
