// SPDX-License-Identifier: Apache-2.0
#include <httplib.h>

#include "provabs/error.hpp"
#include "provabs/io.hpp"
#include "provabs/service.hpp"

namespace provabs {

using nlohmann::json;

namespace {

constexpr const char* kJson = "application/json";

void send(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump() + "\n", kJson);
}

void send_error(httplib::Response& res, const ApiError& e) { send(res, e.status(), e.to_json()); }

json body_json(const httplib::Request& req) {
  try {
    return parse_json(req.body);
  } catch (const ParseError& e) {
    throw ApiError(422, "parse_error", e.what());
  }
}

bool is_text(const httplib::Request& req) {
  const auto type = req.get_header_value("Content-Type");
  return type.rfind("text/plain", 0) == 0;
}

template <typename Action>
httplib::Server::Handler handler(Service& service, const ServerOptions& options, bool mutates, Action action) {
  return [&service, options, mutates, action](const httplib::Request& req, httplib::Response& res) {
    try {
      auto [status, body] = action(req);
      if (mutates && options.snapshot) service.save(*options.snapshot);
      send(res, status, body);
    } catch (const ApiError& e) {
      send_error(res, e);
    } catch (const Error& e) {
      send_error(res, ApiError(422, "validation_failed", e.what(), e.details()));
    } catch (const std::exception& e) {
      send_error(res, ApiError(500, "internal_error", e.what()));
    }
  };
}

template <typename F>
auto as_validation(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ParseError& e) {
    throw ApiError(422, "parse_error", e.what(), e.details());
  } catch (const Error& e) {
    throw ApiError(422, "validation_failed", e.what(), e.details());
  }
}

using Result = std::pair<int, json>;

}  // namespace

void mount_routes(httplib::Server& server, Service& service, const ServerOptions& options) {
  const std::string session = R"(/api/sessions/([^/]+))";

  server.Post("/api/sessions", handler(service, options, true, [&](const httplib::Request&) {
                return Result{201, json{{"id", service.create_session()}}};
              }));

  server.Put(session + "/provenance", handler(service, options, true, [&](const httplib::Request& req) {
               const std::string id = req.matches[1];
               if (!service.has_session(id)) throw ApiError(404, "session_not_found", "unknown session '" + id + "'");
               auto bundle = as_validation([&] {
                 return is_text(req) ? parse_bundle(req.body, Format::text) : bundle_from_json(body_json(req));
               });
               return Result{200, service.put_provenance(id, std::move(bundle))};
             }));

  server.Put(session + "/tree", handler(service, options, true, [&](const httplib::Request& req) {
               const std::string id = req.matches[1];
               if (!service.has_session(id)) throw ApiError(404, "session_not_found", "unknown session '" + id + "'");
               auto tree = as_validation([&] { return tree_from_json(body_json(req)); });
               return Result{200, service.put_tree(id, std::move(tree))};
             }));

  server.Put(session + "/baseline", handler(service, options, true, [&](const httplib::Request& req) {
               const std::string id = req.matches[1];
               if (!service.has_session(id)) throw ApiError(404, "session_not_found", "unknown session '" + id + "'");
               auto val = as_validation([&] { return valuation_from_json(body_json(req)); });
               return Result{200, service.put_baseline(id, std::move(val))};
             }));

  server.Post(session + "/compress", handler(service, options, true, [&](const httplib::Request& req) {
                const std::string id = req.matches[1];
                const json body = body_json(req);
                auto b = body.is_object() ? body.find("bound") : body.end();
                if (!body.is_object() || b == body.end() || !b->is_number_integer()) {
                  throw ApiError(422, "validation_failed", "bound: expected an integer");
                }
                if (b->get<long long>() < 1) throw ApiError(422, "validation_failed", "bound must be ≥ 1");
                return Result{200, service.compress(id, b->get<std::size_t>())};
              }));

  server.Post(session + "/evaluate", handler(service, options, false, [&](const httplib::Request& req) {
                const std::string id = req.matches[1];
                return Result{200, service.evaluate(id, req.body.empty() ? json::object() : body_json(req))};
              }));

  server.Get(session + "/metavars", handler(service, options, false, [&](const httplib::Request& req) {
               return Result{200, service.metavars(req.matches[1])};
             }));
  server.Get(session + "/diagnostics", handler(service, options, false, [&](const httplib::Request& req) {
               return Result{200, service.diagnostics(req.matches[1])};
             }));
  server.Get(session + "/baseline-results", handler(service, options, false, [&](const httplib::Request& req) {
               return Result{200, service.baseline_results(req.matches[1])};
             }));

  if (options.static_dir) server.set_mount_point("/", options.static_dir->string());

  server.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (!res.body.empty()) return httplib::Server::HandlerResponse::Unhandled;
    send(res, res.status,
         ApiError(res.status, res.status == 404 ? "not_found" : "http_error",
                  "no route for " + req.method + " " + req.path)
             .to_json());
    return httplib::Server::HandlerResponse::Handled;
  });
}

}  // namespace provabs
