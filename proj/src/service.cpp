/*
 * mealtrace - blood glucose mealtime analytics
 *
 * Released under the Apache 2.0 Licence
 */
#include "mealtrace/service.hpp"

#include <httplib.h>
#include <json.hpp>

#include "mealtrace/audit.hpp"
#include "mealtrace/error.hpp"
#include "mealtrace/report_json.hpp"

namespace mealtrace {

namespace {

constexpr const char* kJsonMime = "application/json";

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::unknown_participant:
      return 404;
    case ErrorCode::conflicting_duplicate:
    case ErrorCode::no_candidates:
    case ErrorCode::insufficient_data:
      return 409;
    case ErrorCode::storage_failure:
    case ErrorCode::bind_failure:
      return 500;
    default:
      return 400;  // malformed or invalid input
  }
}

void send_error(httplib::Response& res, ErrorCode code, const std::string& message) {
  res.status = status_for(code);
  res.set_content(error_document(code, message), kJsonMime);
}

template <typename Handler>
auto guarded(Handler handler) {
  return [handler](const httplib::Request& req, httplib::Response& res) {
    try {
      handler(req, res);
    } catch (const Error& e) {
      send_error(res, e.code(), e.what());
    } catch (const std::exception& e) {
      send_error(res, ErrorCode::storage_failure, e.what());
    }
  };
}

std::vector<GlucoseSample> parse_batch(const std::string& body) {
  nlohmann::json doc = nlohmann::json::parse(body, nullptr, false);
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("samples") ||
      !doc["samples"].is_array()) {
    fail(ErrorCode::parse_error, "body must be {\"samples\": [...]}");
  }
  std::vector<GlucoseSample> samples;
  samples.reserve(doc["samples"].size());
  for (const auto& item : doc["samples"]) {
    if (!item.is_object() || !item.contains("timestamp") ||
        !item["timestamp"].is_string() || !item.contains("glucose_mmol_l") ||
        !item["glucose_mmol_l"].is_number()) {
      fail(ErrorCode::parse_error,
           "each sample requires timestamp and glucose_mmol_l");
    }
    GlucoseSample s;
    s.timestamp = OffsetTime::parse_rfc3339(item["timestamp"].get<std::string>());
    s.glucose_mmol_l = item["glucose_mmol_l"].get<double>();
    samples.push_back(s);
  }
  return samples;
}

OffsetTime required_time_param(const httplib::Request& req, const char* name) {
  if (!req.has_param(name)) {
    fail(ErrorCode::parse_error, std::string("missing query parameter '") + name + "'");
  }
  return OffsetTime::parse_rfc3339(req.get_param_value(name));
}

}  // namespace

Service::Service(ServiceConfig config)
    : config_(std::move(config)),
      log_(config_.data_dir),
      server_(std::make_unique<httplib::Server>()) {
  config_.sampling.validate();
  config_.detector.validate();
  install_routes();
}

Service::~Service() { stop(); }

void Service::install_routes() {
  auto& svr = *server_;

  svr.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("{\"status\":\"ok\"}\n", kJsonMime);
  });

  svr.Post(R"(/v1/participants/([^/]+)/samples)",
           guarded([this](const httplib::Request& req, httplib::Response& res) {
             const std::string id = req.matches[1];
             auto samples = parse_batch(req.body);
             auto result = log_.append_samples(id, samples);
             nlohmann::json body{{"accepted", result.accepted},
                                 {"duplicates", result.duplicates}};
             res.set_content(body.dump(2) + "\n", kJsonMime);
           }));

  svr.Get(R"(/v1/participants/([^/]+)/completeness)",
          guarded([this](const httplib::Request& req, httplib::Response& res) {
            const std::string id = req.matches[1];
            const auto window = StudyWindow::make(required_time_param(req, "start"),
                                                  required_time_param(req, "end"));
            auto series = log_.load_series(id);
            auto report =
                completeness(series, window, config_.sampling.nominal_period);
            res.set_content(completeness_document(report), kJsonMime);
          }));

  svr.Get(R"(/v1/participants/([^/]+)/routine)",
          guarded([this](const httplib::Request& req, httplib::Response& res) {
            const std::string id = req.matches[1];
            auto series = log_.load_series(id);
            auto analysis = analyze(series, config_.sampling, config_.detector);
            res.set_content(analysis_document(id, analysis), kJsonMime);
          }));

  svr.Get(R"(/v1/participants/([^/]+)/events)",
          guarded([this](const httplib::Request& req, httplib::Response& res) {
            const std::string id = req.matches[1];
            auto series = log_.load_series(id);
            auto analysis = analyze_stages(series, config_.sampling, config_.detector);
            res.set_content(events_document(analysis.events), kJsonMime);
          }));
}

int Service::start() {
  int port = config_.port;
  if (port == 0) {
    port = server_->bind_to_any_port(config_.host);
    if (port < 0) fail(ErrorCode::bind_failure, "cannot bind " + config_.host);
  } else if (!server_->bind_to_port(config_.host, port)) {
    fail(ErrorCode::bind_failure,
         "cannot bind " + config_.host + ":" + std::to_string(port));
  }
  serve_thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port;
}

void Service::run() {
  if (!server_->listen(config_.host, config_.port)) {
    fail(ErrorCode::bind_failure,
         "cannot listen on " + config_.host + ":" + std::to_string(config_.port));
  }
}

void Service::stop() {
  if (server_) server_->stop();
  if (serve_thread_.joinable()) serve_thread_.join();
}

}  // namespace mealtrace
