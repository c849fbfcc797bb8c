#ifndef PHENOID_SERVICE_HTTP_H_
#define PHENOID_SERVICE_HTTP_H_

#include <map>
#include <mutex>
#include <string>

#include "json.hpp"
#include "phenoid/service/runs.h"

namespace phenoid::service {

struct ApiRequest {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
  std::string idempotency_key;
};

struct ApiResponse {
  int status = 200;
  nlohmann::json body;
};

// Error body {code, message, required_state?} and HTTP status for an Error.
ApiResponse ErrorResponse(const std::exception& e);

// Routes requests to a RunManager. Responses to mutating requests that carry
// an idempotency key are remembered (and persisted under the data directory)
// and replayed verbatim on retry.
class Api {
 public:
  Api(RunManager& runs, std::filesystem::path data_dir);
  ApiResponse Handle(const ApiRequest& request);

 private:
  ApiResponse Route(const ApiRequest& request);

  RunManager& runs_;
  std::filesystem::path idempotency_file_;
  std::mutex mutex_;
  std::map<std::string, ApiResponse> replies_;
  std::map<std::string, std::unique_ptr<std::mutex>> key_locks_;
};

// Blocks serving HTTP on host:port until the process is stopped.
void Serve(Api& api, const std::string& host, int port);

}  // namespace phenoid::service

#endif  // PHENOID_SERVICE_HTTP_H_
