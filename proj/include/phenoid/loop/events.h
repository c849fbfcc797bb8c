#ifndef PHENOID_LOOP_EVENTS_H_
#define PHENOID_LOOP_EVENTS_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace phenoid::loop {

struct Event {
  uint64_t seq = 0;  // 1-based, contiguous
  std::string timestamp;
  std::string type;
  nlohmann::json payload;

  nlohmann::json ToJson() const;
  static Event FromJson(const nlohmann::json& j);
};

// Append-only event log, optionally mirrored to a newline-delimited file.
// Every event is flushed to disk before Append returns.
class EventLog {
 public:
  EventLog() = default;
  explicit EventLog(std::filesystem::path file) : file_(std::move(file)) {}

  // Reads an existing log. A final line without a trailing newline is a torn
  // write and is dropped; any other malformed line -> Error(kParse).
  static EventLog Open(const std::filesystem::path& file);
  static std::vector<Event> ReadFile(const std::filesystem::path& file);

  const Event& Append(const std::string& type, nlohmann::json payload);
  const std::vector<Event>& events() const { return events_; }
  const std::optional<std::filesystem::path>& file() const { return file_; }

 private:
  std::optional<std::filesystem::path> file_;
  std::vector<Event> events_;
};

std::string UtcTimestamp();

}  // namespace phenoid::loop

#endif  // PHENOID_LOOP_EVENTS_H_
