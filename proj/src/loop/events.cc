#include "phenoid/loop/events.h"

#include <chrono>
#include <cstdio>
#include <ctime>

#include "phenoid/common/error.h"
#include "phenoid/common/io.h"

namespace phenoid::loop {

std::string UtcTimestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  const auto ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec,
                static_cast<int>(ms));
  return buf;
}

nlohmann::json Event::ToJson() const {
  return {{"seq", seq}, {"timestamp", timestamp}, {"type", type}, {"payload", payload}};
}

Event Event::FromJson(const nlohmann::json& j) {
  Event e;
  e.seq = j.at("seq").get<uint64_t>();
  e.timestamp = j.at("timestamp").get<std::string>();
  e.type = j.at("type").get<std::string>();
  e.payload = j.at("payload");
  return e;
}

std::vector<Event> EventLog::ReadFile(const std::filesystem::path& file) {
  const std::string text = phenoid::ReadFile(file);
  std::vector<Event> events;
  size_t pos = 0;
  size_t line_no = 0;
  while (pos < text.size()) {
    const size_t end = text.find('\n', pos);
    ++line_no;
    if (end == std::string::npos) break;  // torn final write
    const std::string_view line(text.data() + pos, end - pos);
    pos = end + 1;
    if (Trim(line).empty()) continue;
    Event e;
    try {
      e = Event::FromJson(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& ex) {
      throw Error(ErrorCode::kParse, file.string() + ":" + std::to_string(line_no) + ": " +
                                         ex.what());
    }
    if (e.seq != events.size() + 1) {
      throw Error(ErrorCode::kParse, file.string() + ": event sequence gap at line " +
                                         std::to_string(line_no));
    }
    events.push_back(std::move(e));
  }
  return events;
}

EventLog EventLog::Open(const std::filesystem::path& file) {
  EventLog log(file);
  if (!std::filesystem::exists(file)) return log;
  log.events_ = ReadFile(file);
  // Cut a torn tail so later appends start on a fresh line.
  const std::string text = phenoid::ReadFile(file);
  if (!text.empty() && text.back() != '\n') {
    WriteFileAtomic(file, std::string_view(text).substr(0, text.rfind('\n') + 1));
  }
  return log;
}

const Event& EventLog::Append(const std::string& type, nlohmann::json payload) {
  Event e;
  e.seq = events_.size() + 1;
  e.timestamp = UtcTimestamp();
  e.type = type;
  e.payload = std::move(payload);
  if (file_) AppendLine(*file_, e.ToJson().dump());
  events_.push_back(std::move(e));
  return events_.back();
}

}  // namespace phenoid::loop
