#pragma once

#include "tutor/domain.hpp"

#include <filesystem>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

namespace tutor {

struct StoreError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using EventLogs = std::map<std::string, std::vector<SessionEvent>>;

// Append-only per-session event logs.
class EventStore {
public:
  virtual ~EventStore() = default;
  // Appends the whole batch or throws StoreError.
  virtual void append(const std::string& session_id, const std::vector<SessionEvent>& events) = 0;
  virtual EventLogs load_all() const = 0;
};

class MemoryEventStore final : public EventStore {
public:
  void append(const std::string& session_id, const std::vector<SessionEvent>& events) override;
  EventLogs load_all() const override;

private:
  mutable std::mutex mutex_;
  EventLogs logs_;
};

// One JSON record per line in <data_dir>/<session_id>.log. A final line
// without its newline terminator (an interrupted append) is ignored on load.
class FileEventStore final : public EventStore {
public:
  explicit FileEventStore(std::filesystem::path data_dir);

  void append(const std::string& session_id, const std::vector<SessionEvent>& events) override;
  EventLogs load_all() const override;

  std::filesystem::path log_path(const std::string& session_id) const;

private:
  std::filesystem::path dir_;
  mutable std::mutex mutex_;
};

// Serialized form of one log line, without the trailing newline.
std::string encode_event_line(const SessionEvent& event);
std::vector<SessionEvent> decode_event_log(std::string_view text);

}  // namespace tutor
