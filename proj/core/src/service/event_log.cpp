#include "narrex/service/event_log.hpp"

#include <unistd.h>

#include <chrono>
#include <ctime>
#include <fstream>

#include "narrex/error.hpp"

namespace narrex::service {

nlohmann::json to_json(const Event& e) {
  return {{"seq", e.seq}, {"timestamp", e.timestamp}, {"interaction", narrex::to_json(e.interaction)}};
}

Event event_from_json(const nlohmann::json& j) {
  Event e;
  e.seq = j.at("seq").get<std::uint64_t>();
  e.timestamp = j.at("timestamp").get<std::string>();
  e.interaction = interaction_from_json(j.at("interaction"));
  return e;
}

EventLog::EventLog(std::filesystem::path path) : path_(std::move(path)) {
  file_ = std::fopen(path_.c_str(), "ab");
  if (!file_) throw Error("storage-error", "cannot open event log " + path_.string(), path_.string());
}

EventLog::~EventLog() {
  if (file_) std::fclose(file_);
}

void EventLog::append(const Event& event) {
  std::string line = to_json(event).dump() + "\n";
  if (std::fwrite(line.data(), 1, line.size(), file_) != line.size() || std::fflush(file_) != 0 ||
      ::fsync(::fileno(file_)) != 0) {
    throw Error("storage-error", "cannot append to event log " + path_.string(), path_.string());
  }
}

std::vector<Event> EventLog::read(const std::filesystem::path& path) {
  std::vector<Event> out;
  std::ifstream in(path, std::ios::binary);
  if (!in) return out;
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::size_t start = 0;
  std::size_t number = 0;
  while (start < content.size()) {
    std::size_t nl = content.find('\n', start);
    ++number;
    if (nl == std::string::npos) break;  // torn final write
    std::string line = content.substr(start, nl - start);
    start = nl + 1;
    if (line.empty()) continue;
    try {
      out.push_back(event_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      throw Error("storage-error", "corrupt event log " + path.string() + " at line " + std::to_string(number),
                  e.what());
    }
  }
  return out;
}

std::string utc_timestamp() {
  using namespace std::chrono;
  auto now = system_clock::now();
  std::time_t t = system_clock::to_time_t(now);
  auto ms = duration_cast<milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  char out[40];
  std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms));
  return out;
}

}  // namespace narrex::service
