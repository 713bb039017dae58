#include "narrex/service/http_service.hpp"

#include <httplib.h>

#include <charconv>
#include <iostream>

#include "narrex/error.hpp"
#include "narrex/exploration.hpp"
#include "narrex/service/session_store.hpp"

namespace narrex::service {

namespace {

using nlohmann::json;

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(2) + "\n", "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& code, const std::string& message,
                const std::string& detail = {}) {
  send_json(res, status, {{"code", code}, {"message", message}, {"detail", detail}});
}

json body_json(const httplib::Request& req) {
  try {
    return json::parse(req.body);
  } catch (const json::parse_error& e) {
    throw Error("malformed-request", "request body is not valid JSON", e.what());
  }
}

json warnings_json(const std::vector<Violation>& warnings) { return to_json(warnings); }

json nodes_json(const std::vector<InfoNode>& nodes) {
  json arr = json::array();
  for (const InfoNode& n : nodes) arr.push_back(to_json(n));
  return arr;
}

json argument_json(const Argument& a) {
  return {{"id", a.id},
          {"claim", a.claim},
          {"stance", std::string(to_string(a.stance))},
          {"target", a.target ? json(*a.target) : json(nullptr)},
          {"evidence", a.evidence}};
}

// Wraps a handler so library errors become {code, message, detail} bodies.
template <typename F>
auto guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const Error& e) {
      send_error(res, http_status(e.code()), e.code(), e.what(), e.detail());
    } catch (const json::exception& e) {
      send_error(res, 400, "malformed-request", "malformed request", e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, "internal-error", e.what());
    }
  };
}

}  // namespace

void parse_listen_address(std::string_view text, ServiceConfig& config) {
  auto colon = text.rfind(':');
  std::string_view port = colon == std::string_view::npos ? text : text.substr(colon + 1);
  int value = -1;
  auto [ptr, ec] = std::from_chars(port.data(), port.data() + port.size(), value);
  if (ec != std::errc() || ptr != port.data() + port.size() || value < 0 || value > 65535) {
    throw Error("invalid-listen-address", "expected host:port, got '" + std::string(text) + "'", std::string(text));
  }
  config.port = value;
  if (colon != std::string_view::npos && colon > 0) config.host = std::string(text.substr(0, colon));
}

int http_status(const std::string& code) {
  if (code == "unknown-session") return 404;
  if (code == "storage-error" || code == "internal-error") return 500;
  if (code == "syntax-error" || code == "malformed-request" || code == "malformed-arguments" ||
      code == "dangling-reference" || code == "taxonomy-cycle" || code == "duplicate-id" ||
      code == "invalid-structure" || code == "unknown-concept" || code == "invalid-heuristic-order") {
    return 400;
  }
  if (code == "already-present" || code == "nothing-to-expand") return 409;
  return 422;
}

struct HttpService::Impl {
  ServiceConfig config;
  SessionStore store;
  httplib::Server server;

  explicit Impl(ServiceConfig c) : config(std::move(c)), store(config.storage, config.heuristic_order) { routes(); }

  void routes() {
    server.Post("/sessions", guarded([this](const httplib::Request& req, httplib::Response& res) {
      json body = body_json(req);
      if (!body.is_object() || !body.contains("bundle")) {
        throw Error("malformed-request", "expected {\"bundle\": ..., \"mode\"?, \"goal\"?}");
      }
      CreateRequest create;
      create.bundle = body["bundle"];
      if (body.contains("mode")) {
        std::string mode = body["mode"].get<std::string>();
        if (mode == "ex-ante") {
          create.mode = ExplanationMode::ex_ante;
        } else if (mode == "ex-post") {
          create.mode = ExplanationMode::ex_post;
        } else {
          throw Error("malformed-request", "mode must be ex-ante or ex-post", mode);
        }
      }
      if (body.contains("goal")) create.goal = body["goal"].get<std::string>();
      CreateResult created = store.create(create);
      json snap = store.snapshot(created.id);
      snap["warnings"] = warnings_json(created.warnings);
      snap["actions"] = to_json(store.actions(created.id));
      send_json(res, 201, snap);
    }));

    server.Get(R"(/sessions/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
      std::string id = req.matches[1];
      send_json(res, 200, store.snapshot(id));
    }));

    server.Get(R"(/sessions/([^/]+)/actions)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      std::string id = req.matches[1];
      send_json(res, 200, {{"actions", to_json(store.actions(id))}});
    }));

    server.Post(R"(/sessions/([^/]+)/actions)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      std::string id = req.matches[1];
      json body = body_json(req);
      Interaction interaction = body.is_object() && body.contains("script") && body["script"].is_string()
                                    ? parse_interaction(body["script"].get<std::string>())
                                    : interaction_from_json(body);
      ApplyResult applied = store.apply(id, interaction);
      json out = {{"appended", nodes_json(applied.appended)},
                  {"explanans_size", applied.explanans_size},
                  {"actions", to_json(applied.actions)}};
      if (applied.argument) out["argument"] = argument_json(*applied.argument);
      send_json(res, 200, out);
    }));

    server.Get(R"(/sessions/([^/]+)/narrative)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      std::string id = req.matches[1];
      std::string format = req.has_param("format") ? req.get_param_value("format") : "json";
      if (format == "json") {
        res.status = 200;
        res.set_content(store.export_narrative(id, ExportFormat::structured_data), "application/json");
      } else if (format == "markdown") {
        res.status = 200;
        res.set_content(store.export_narrative(id, ExportFormat::document_text), "text/markdown; charset=utf-8");
      } else {
        throw Error("malformed-request", "format must be json or markdown", format);
      }
    }));

    server.Get(R"(/sessions/([^/]+)/events)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      std::string id = req.matches[1];
      json events = json::array();
      for (const Event& e : store.events(id)) events.push_back(to_json(e));
      send_json(res, 200, {{"events", std::move(events)}});
    }));

    server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
      if (res.body.empty()) {
        send_error(res, res.status, res.status == 404 ? "not-found" : "http-error",
                   "HTTP " + std::to_string(res.status));
      }
    });
  }
};

HttpService::HttpService(ServiceConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}

HttpService::~HttpService() = default;

int HttpService::bind() {
  int port = impl_->config.port;
  if (port == 0) {
    port = impl_->server.bind_to_any_port(impl_->config.host);
  } else if (!impl_->server.bind_to_port(impl_->config.host, port)) {
    port = -1;
  }
  if (port < 0) {
    throw Error("bind-failed", "cannot listen on " + impl_->config.host + ":" + std::to_string(impl_->config.port));
  }
  return port;
}

void HttpService::serve() { impl_->server.listen_after_bind(); }

void HttpService::stop() { impl_->server.stop(); }

}  // namespace narrex::service
