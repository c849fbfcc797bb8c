#include "phenoid/service/http.h"

#include <sstream>

#include "httplib.h"
#include "phenoid/common/error.h"
#include "phenoid/common/io.h"

namespace phenoid::service {

namespace {

int StatusFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotFound:
      return 404;
    case ErrorCode::kConflict:
    case ErrorCode::kInsufficientLabels:
      return 409;
    default:
      return IsValidationError(code) ? 400 : 500;
  }
}

std::vector<std::string> PathSegments(const std::string& path) {
  std::vector<std::string> out;
  for (std::string_view part : Split(path, '/')) {
    if (!part.empty()) out.emplace_back(part);
  }
  return out;
}

nlohmann::json ParseBody(const std::string& body) {
  if (Trim(body).empty()) return nlohmann::json::object();
  try {
    return nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kValidation, std::string("request body is not JSON: ") + e.what());
  }
}

size_t ParseCount(const std::map<std::string, std::string>& query, const std::string& key,
                  size_t fallback) {
  auto it = query.find(key);
  if (it == query.end()) return fallback;
  size_t used = 0;
  long v = 0;
  try {
    v = std::stol(it->second, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != it->second.size() || v <= 0) {
    throw Error(ErrorCode::kValidation, key + " must be a positive integer");
  }
  return static_cast<size_t>(v);
}

ApiResponse MethodNotAllowed() {
  return {405, {{"code", "MethodNotAllowed"}, {"message", "method not allowed"}}};
}

}  // namespace

ApiResponse ErrorResponse(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    nlohmann::json body = {{"code", std::string(ErrorCodeName(err->code()))},
                           {"message", err->what()}};
    if (const auto* conflict = dynamic_cast<const loop::ConflictError*>(&e)) {
      body["required_state"] = conflict->required_state();
    }
    return {StatusFor(err->code()), body};
  }
  return {500, {{"code", "Internal"}, {"message", e.what()}}};
}

Api::Api(RunManager& runs, std::filesystem::path data_dir)
    : runs_(runs), idempotency_file_(std::move(data_dir) / "idempotency.jsonl") {
  if (!std::filesystem::exists(idempotency_file_)) return;
  std::istringstream in(ReadFile(idempotency_file_));
  std::string line;
  while (std::getline(in, line)) {
    try {
      const auto j = nlohmann::json::parse(line);
      replies_[j.at("key").get<std::string>()] = {j.at("status").get<int>(), j.at("body")};
    } catch (const nlohmann::json::exception&) {
      // A torn final line from a crash; that request was never acknowledged.
    }
  }
}

ApiResponse Api::Handle(const ApiRequest& request) {
  if (request.method != "POST" || request.idempotency_key.empty()) return Route(request);

  const std::string key = request.path + "\n" + request.idempotency_key;
  std::mutex* key_lock = nullptr;
  {
    std::lock_guard lock(mutex_);
    auto it = replies_.find(key);
    if (it != replies_.end()) {
      ApiResponse replay = it->second;
      if (replay.status == 201) replay.status = 200;
      return replay;
    }
    auto& slot = key_locks_[key];
    if (!slot) slot = std::make_unique<std::mutex>();
    key_lock = slot.get();
  }
  // Concurrent retries of the same key serialize here; the loser replays.
  std::lock_guard held(*key_lock);
  {
    std::lock_guard lock(mutex_);
    auto it = replies_.find(key);
    if (it != replies_.end()) {
      ApiResponse replay = it->second;
      if (replay.status == 201) replay.status = 200;
      return replay;
    }
  }
  ApiResponse response = Route(request);
  if (response.status < 500) {
    std::lock_guard lock(mutex_);
    replies_[key] = response;
    AppendLine(idempotency_file_,
               nlohmann::json{{"key", key}, {"status", response.status}, {"body", response.body}}
                   .dump());
  }
  return response;
}

ApiResponse Api::Route(const ApiRequest& request) {
  try {
    const std::vector<std::string> seg = PathSegments(request.path);
    const std::string& m = request.method;
    if (seg.size() == 1 && seg[0] == "health") {
      if (m != "GET") return MethodNotAllowed();
      return {200, {{"status", "ok"}}};
    }
    if (seg.empty() || seg[0] != "runs") {
      throw Error(ErrorCode::kNotFound, "no route for " + request.path);
    }
    if (seg.size() == 1) {
      if (m != "POST") return MethodNotAllowed();
      return {201, runs_.CreateRun(ParseBody(request.body))};
    }
    const std::string& id = seg[1];
    if (seg.size() == 2) {
      if (m != "GET") return MethodNotAllowed();
      return {200, runs_.GetRun(id)};
    }
    const std::string& leaf = seg[2];
    if (seg.size() == 4 && leaf == "queue" && seg[3] == "next") {
      if (m != "GET") return MethodNotAllowed();
      auto it = request.query.find("annotator");
      return {200, runs_.NextQueueItem(id, it == request.query.end() ? "" : it->second)};
    }
    if (seg.size() == 3 && leaf == "labels") {
      if (m != "POST") return MethodNotAllowed();
      return {200, runs_.PostLabel(id, ParseBody(request.body))};
    }
    if (seg.size() == 4 && leaf == "features") {
      if (seg[3] == "top") {
        if (m != "GET") return MethodNotAllowed();
        return {200, runs_.TopFeatures(id, ParseCount(request.query, "m", 20))};
      }
      if (seg[3] == "verdicts") {
        if (m != "POST") return MethodNotAllowed();
        return {200, runs_.PostVerdicts(id, ParseBody(request.body))};
      }
      if (seg[3] == "reinstate") {
        if (m != "POST") return MethodNotAllowed();
        return {200, runs_.Reinstate(id, ParseBody(request.body))};
      }
    }
    if (seg.size() == 3 && leaf == "iterate") {
      if (m != "POST") return MethodNotAllowed();
      return {202, runs_.TriggerIterate(id)};
    }
    if (seg.size() == 3 && leaf == "metrics") {
      if (m != "GET") return MethodNotAllowed();
      return {200, runs_.Metrics(id)};
    }
    if (seg.size() == 4 && leaf == "explanations") {
      if (m != "GET") return MethodNotAllowed();
      return {200, runs_.Explanation(id, seg[3])};
    }
    throw Error(ErrorCode::kNotFound, "no route for " + request.path);
  } catch (const std::exception& e) {
    return ErrorResponse(e);
  }
}

void Serve(Api& api, const std::string& host, int port) {
  httplib::Server server;
  auto handler = [&api](const httplib::Request& req, httplib::Response& res) {
    ApiRequest request{req.method, req.path, {}, req.body, req.get_header_value("Idempotency-Key")};
    for (const auto& [k, v] : req.params) request.query[k] = v;
    const ApiResponse response = api.Handle(request);
    res.status = response.status;
    res.set_content(response.body.dump(), "application/json");
  };
  server.Get(".*", handler);
  server.Post(".*", handler);
  server.Put(".*", handler);
  server.Delete(".*", handler);
  if (!server.listen(host, port)) {
    throw Error(ErrorCode::kIo, "cannot listen on " + host + ":" + std::to_string(port));
  }
}

}  // namespace phenoid::service
