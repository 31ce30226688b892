#include "sopeval/service.hpp"

#include <algorithm>
#include <cctype>

#include "httplib.h"
#include "sopeval/error.hpp"
#include "sopeval/text.hpp"

namespace sopeval::service {
namespace {

using nlohmann::json;

Response error(int status, std::string message) {
  return {status, json{{"error", std::move(message)}, {"status", status}}};
}

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
}

void reply(httplib::Response& res, const Response& r) {
  res.status = r.status;
  res.set_content(r.body.dump(), "application/json");
}

}  // namespace

void EvaluationService::install(std::shared_ptr<const TrainedModel> model, features::Resources resources) {
  if (!model) throw Error("service", "no model to install");
  features::check_resources(model->config, resources);
  auto state = std::make_shared<const State>(State{std::move(model), std::move(resources)});
  std::lock_guard lock(mutex_);
  state_ = std::move(state);
  load_error_.clear();
}

void EvaluationService::fail(std::string message) {
  std::lock_guard lock(mutex_);
  load_error_ = std::move(message);
}

bool EvaluationService::ready() const { return snapshot() != nullptr; }

std::shared_ptr<const EvaluationService::State> EvaluationService::snapshot() const {
  std::lock_guard lock(mutex_);
  return state_;
}

Response EvaluationService::evaluate(std::string_view request_body) const {
  const auto state = snapshot();
  if (!state) return error(503, "model not loaded");
  json request;
  try {
    request = json::parse(request_body);
  } catch (const json::parse_error&) {
    return error(400, "request body must be JSON of the form {\"text\": \"...\"}");
  }
  if (!request.is_object() || !request.contains("text") || !request["text"].is_string()) {
    return error(422, "field 'text' (string) is required");
  }
  const auto& essay = request["text"].get_ref<const std::string&>();
  if (blank(essay)) return error(422, "text is empty");
  if (text::char_count(essay) > kMaxTextLength) {
    return error(413, "text exceeds " + std::to_string(kMaxTextLength) + " characters");
  }
  try {
    auto body = to_json(evaluate_text(*state->model, state->resources, essay));
    body["feature_config_hash"] = state->model->config_hash();
    return {200, std::move(body)};
  } catch (const Error& e) {
    if (e.module() == "text") return error(422, e.what());
    return error(500, e.what());
  }
}

Response EvaluationService::health() const {
  const auto state = snapshot();
  if (!state) {
    std::lock_guard lock(mutex_);
    if (!load_error_.empty()) return {503, json{{"status", "error"}, {"error", load_error_}}};
    return {200, json{{"status", "loading"}, {"model_id", nullptr}, {"feature_config_hash", nullptr}}};
  }
  return {200, json{{"status", "ok"},
                    {"model_id", state->model->model_id},
                    {"feature_config_hash", state->model->config_hash()}}};
}

void register_routes(httplib::Server& server, const EvaluationService& service) {
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Headers", "Content-Type"},
                              {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
  server.Options(R"(/v1/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  server.Post("/v1/evaluate", [&service](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.evaluate(req.body));
  });
  server.Get("/v1/health",
             [&service](const httplib::Request&, httplib::Response& res) { reply(res, service.health()); });
}

}  // namespace sopeval::service
