#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>

#include "mm/session/session.hpp"

namespace mm {

class UnknownSession : public SessionError {
 public:
  using SessionError::SessionError;
};

/// JSON Lines event log: one event per line, flushed on every append.
class EventLogWriter {
 public:
  explicit EventLogWriter(const std::filesystem::path& file);
  void append(const SessionEvent& e);

 private:
  std::ofstream out_;
};

std::vector<SessionEvent> read_event_log(const std::filesystem::path& file);
void write_event_log(const std::filesystem::path& file, const std::vector<SessionEvent>& events);

/// Live sessions keyed by opaque token. Operations on one session are
/// serialized by a per-session lock; distinct sessions run concurrently.
class SessionStore {
 public:
  SessionStore(const TaskCatalog& catalog, FeedbackServices services,
               std::optional<std::filesystem::path> log_dir = std::nullopt, Clock clock = system_clock());

  /// Throws SessionError when the pseudonym already has an open session in this phase.
  std::string create(const std::string& pseudonym, Group group, Phase phase);

  /// Runs `f` on the session under its lock. Throws UnknownSession for unknown tokens.
  template <typename F>
  auto with_session(const std::string& token, F&& f) {
    Entry& e = entry(token);
    std::lock_guard lock(e.mu);
    return f(*e.session);
  }

  /// Replays every log in the log directory; returns the number of sessions restored.
  std::size_t restore();
  std::vector<std::string> tokens() const;

 private:
  struct Entry {
    std::mutex mu;
    std::unique_ptr<Session> session;
    std::shared_ptr<EventLogWriter> log;
  };

  Entry& entry(const std::string& token);
  EventSink sink_for(const std::shared_ptr<EventLogWriter>& log);
  std::string fresh_token();

  const TaskCatalog& catalog_;
  FeedbackServices services_;
  std::optional<std::filesystem::path> log_dir_;
  Clock clock_;
  mutable std::shared_mutex mu_;
  std::map<std::string, std::unique_ptr<Entry>> sessions_;
};

}  // namespace mm
