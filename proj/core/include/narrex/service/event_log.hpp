#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "narrex/space.hpp"

namespace narrex::service {

struct Event {
  std::uint64_t seq = 0;
  std::string timestamp;
  Interaction interaction;
};

nlohmann::json to_json(const Event& event);
Event event_from_json(const nlohmann::json& j);

/// Append-only JSON-lines log. Each append is flushed and fsync'ed before
/// returning.
class EventLog {
 public:
  explicit EventLog(std::filesystem::path path);
  ~EventLog();
  EventLog(const EventLog&) = delete;
  EventLog& operator=(const EventLog&) = delete;

  void append(const Event& event);
  const std::filesystem::path& path() const { return path_; }

  /// All complete events. A truncated last line (crash mid-write) is
  /// dropped; any other malformed line throws Error("storage-error").
  static std::vector<Event> read(const std::filesystem::path& path);

 private:
  std::filesystem::path path_;
  std::FILE* file_ = nullptr;
};

/// Current UTC time as 2024-01-31T12:00:00.123Z.
std::string utc_timestamp();

}  // namespace narrex::service
