#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <string_view>

#include "json.hpp"
#include "sopeval/features.hpp"
#include "sopeval/pipeline.hpp"

namespace httplib {
class Server;
}

namespace sopeval::service {

struct Response {
  int status = 200;
  nlohmann::json body;
};

/// Request handling behind /v1/evaluate and /v1/health, independent of the
/// transport. Starts in the loading state until a model is installed; the
/// model and resources are read-only afterwards.
class EvaluationService {
 public:
  static constexpr std::size_t kMaxTextLength = 100000;  // characters

  void install(std::shared_ptr<const TrainedModel> model, features::Resources resources);
  /// Records a failed load; health then reports "error".
  void fail(std::string message);
  bool ready() const;

  /// Body: {"text": "..."}.
  Response evaluate(std::string_view request_body) const;
  Response health() const;

 private:
  struct State {
    std::shared_ptr<const TrainedModel> model;
    features::Resources resources;
  };
  std::shared_ptr<const State> snapshot() const;

  mutable std::mutex mutex_;
  std::shared_ptr<const State> state_;
  std::string load_error_;
};

/// Registers the /v1 routes (with permissive CORS headers) on `server`.
void register_routes(httplib::Server& server, const EvaluationService& service);

}  // namespace sopeval::service
