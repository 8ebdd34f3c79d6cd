#include "mm/session/store.hpp"

#include <algorithm>
#include <random>

namespace mm {

EventLogWriter::EventLogWriter(const std::filesystem::path& file) : out_(file, std::ios::app) {
  if (!out_) throw Error("cannot open event log " + file.string());
}

void EventLogWriter::append(const SessionEvent& e) {
  out_ << to_json(e).dump() << '\n';
  out_.flush();
}

std::vector<SessionEvent> read_event_log(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error("cannot open event log " + file.string());
  std::vector<SessionEvent> events;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      events.push_back(event_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      throw Error(file.string() + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  return events;
}

void write_event_log(const std::filesystem::path& file, const std::vector<SessionEvent>& events) {
  std::ofstream out(file, std::ios::trunc);
  if (!out) throw Error("cannot write event log " + file.string());
  for (const SessionEvent& e : events) out << to_json(e).dump() << '\n';
}

SessionStore::SessionStore(const TaskCatalog& catalog, FeedbackServices services,
                           std::optional<std::filesystem::path> log_dir, Clock clock)
    : catalog_(catalog), services_(services), log_dir_(std::move(log_dir)), clock_(std::move(clock)) {
  if (log_dir_) std::filesystem::create_directories(*log_dir_);
}

std::string SessionStore::fresh_token() {
  static thread_local std::mt19937_64 rng{std::random_device{}()};
  static constexpr char hex[] = "0123456789abcdef";
  std::string t;
  for (int i = 0; i < 2; ++i) {
    std::uint64_t v = rng();
    for (int k = 0; k < 16; ++k, v >>= 4) t += hex[v & 15];
  }
  return t;
}

EventSink SessionStore::sink_for(const std::shared_ptr<EventLogWriter>& log) {
  if (!log) return {};
  return [log](const SessionEvent& e) { log->append(e); };
}

std::string SessionStore::create(const std::string& pseudonym, Group group, Phase phase) {
  std::unique_lock lock(mu_);
  for (const auto& [token, e] : sessions_) {
    std::lock_guard inner(e->mu);
    const Session& s = *e->session;
    if (s.pseudonym() == pseudonym && s.phase() == phase && !s.ended())
      throw SessionError("pseudonym " + pseudonym + " already has an open " + std::string(keyword(phase)) +
                         " session");
  }
  std::string token;
  do token = fresh_token();
  while (sessions_.contains(token));
  auto entry = std::make_unique<Entry>();
  if (log_dir_) entry->log = std::make_shared<EventLogWriter>(*log_dir_ / (token + ".jsonl"));
  entry->session =
      std::make_unique<Session>(token, pseudonym, group, phase, catalog_, services_, clock_, sink_for(entry->log));
  sessions_.emplace(token, std::move(entry));
  return token;
}

SessionStore::Entry& SessionStore::entry(const std::string& token) {
  std::shared_lock lock(mu_);
  auto it = sessions_.find(token);
  if (it == sessions_.end()) throw UnknownSession("unknown session token");
  return *it->second;
}

std::size_t SessionStore::restore() {
  if (!log_dir_) return 0;
  std::unique_lock lock(mu_);
  std::size_t n = 0;
  std::vector<std::filesystem::path> files;
  for (const auto& f : std::filesystem::directory_iterator(*log_dir_))
    if (f.path().extension() == ".jsonl") files.push_back(f.path());
  std::sort(files.begin(), files.end());
  for (const auto& file : files) {
    auto events = read_event_log(file);
    if (events.empty()) continue;
    auto entry = std::make_unique<Entry>();
    entry->log = std::make_shared<EventLogWriter>(file);
    entry->session = std::make_unique<Session>(
        Session::replay(events, catalog_, services_, clock_, sink_for(entry->log)));
    sessions_.insert_or_assign(entry->session->id(), std::move(entry));
    ++n;
  }
  return n;
}

std::vector<std::string> SessionStore::tokens() const {
  std::shared_lock lock(mu_);
  std::vector<std::string> out;
  for (const auto& [t, e] : sessions_) out.push_back(t);
  return out;
}

}  // namespace mm
