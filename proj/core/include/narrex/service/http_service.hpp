#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "narrex/space.hpp"

namespace narrex::service {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  /// 0 binds an ephemeral port.
  int port = 8080;
  std::filesystem::path storage = "narrex-sessions";
  HeuristicOrder heuristic_order = kDefaultHeuristicOrder;
};

/// Parses `host:port` or `:port`. Throws Error("invalid-listen-address").
void parse_listen_address(std::string_view text, ServiceConfig& config);

/// HTTP status for a library error code.
int http_status(const std::string& code);

class HttpService {
 public:
  explicit HttpService(ServiceConfig config);
  ~HttpService();
  HttpService(const HttpService&) = delete;
  HttpService& operator=(const HttpService&) = delete;

  /// Binds the socket; returns the bound port. Throws Error("bind-failed").
  int bind();
  /// Serves until stop(); bind() must have succeeded.
  void serve();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace narrex::service
