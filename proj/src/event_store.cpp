#include "tutor/event_store.hpp"

#include "tutor/serialization.hpp"

#include <fstream>
#include <sstream>

namespace tutor {

namespace {

void check_session_id(const std::string& id) {
  if (id.empty()) throw StoreError("empty session id");
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' || c == '_';
    if (!ok) throw StoreError("session id '" + id + "' is not a valid file name");
  }
}

}  // namespace

std::string encode_event_line(const SessionEvent& event) { return event_to_json(event).dump(); }

std::vector<SessionEvent> decode_event_log(std::string_view text) {
  std::vector<SessionEvent> events;
  std::size_t start = 0;
  std::size_t line_no = 1;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) break;  // interrupted append
    auto line = text.substr(start, nl - start);
    if (!line.empty()) {
      try {
        events.push_back(event_from_json(Json::parse(line)));
      } catch (const std::exception& err) {
        throw StoreError("log line " + std::to_string(line_no) + ": " + err.what());
      }
    }
    start = nl + 1;
    ++line_no;
  }
  return events;
}

void MemoryEventStore::append(const std::string& session_id, const std::vector<SessionEvent>& events) {
  check_session_id(session_id);
  std::lock_guard lock(mutex_);
  auto& log = logs_[session_id];
  log.insert(log.end(), events.begin(), events.end());
}

EventLogs MemoryEventStore::load_all() const {
  std::lock_guard lock(mutex_);
  return logs_;
}

FileEventStore::FileEventStore(std::filesystem::path data_dir) : dir_(std::move(data_dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw StoreError("cannot create data directory " + dir_.string() + ": " + ec.message());
}

std::filesystem::path FileEventStore::log_path(const std::string& session_id) const {
  return dir_ / (session_id + ".log");
}

void FileEventStore::append(const std::string& session_id, const std::vector<SessionEvent>& events) {
  check_session_id(session_id);
  std::string batch;
  for (const auto& event : events) batch += encode_event_line(event) + "\n";
  std::lock_guard lock(mutex_);
  std::ofstream out(log_path(session_id), std::ios::binary | std::ios::app);
  out.write(batch.data(), static_cast<std::streamsize>(batch.size()));
  out.flush();
  if (!out) throw StoreError("failed to append to " + log_path(session_id).string());
}

EventLogs FileEventStore::load_all() const {
  std::lock_guard lock(mutex_);
  EventLogs logs;
  for (const auto& entry : std::filesystem::directory_iterator(dir_)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".log") continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
      logs[entry.path().stem().string()] = decode_event_log(buf.str());
    } catch (const StoreError& err) {
      throw StoreError(entry.path().string() + ": " + err.what());
    }
  }
  return logs;
}

}  // namespace tutor
