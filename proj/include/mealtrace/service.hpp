/*
 * mealtrace - blood glucose mealtime analytics
 *
 * Released under the Apache 2.0 Licence
 */
#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <thread>

#include "mealtrace/detector.hpp"
#include "mealtrace/series.hpp"
#include "mealtrace/store.hpp"

namespace httplib {
class Server;
}

namespace mealtrace {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 binds an ephemeral port
  std::filesystem::path data_dir = "data";
  SamplingSpec sampling;
  DetectorConfig detector;
};

/// HTTP collector and query service over a SampleLog (endpoints in
/// docs/schema.md). Analysis endpoints recompute from the log on every
/// request. Writes are serialized per participant by the log itself.
class Service {
public:
  explicit Service(ServiceConfig config);
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds and serves on a background thread; returns the bound port.
  /// Throws Error(bind_failure).
  int start();

  /// Binds and serves on the calling thread until stop().
  void run();

  void stop();

  SampleLog& log() { return log_; }

private:
  void install_routes();

  ServiceConfig config_;
  SampleLog log_;
  std::unique_ptr<httplib::Server> server_;
  std::thread serve_thread_;
};

}  // namespace mealtrace
