#include "narrex/service/session_store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <fstream>
#include <random>
#include <sstream>

#include "narrex/bundle_io.hpp"
#include "narrex/error.hpp"
#include "narrex/reasoner.hpp"

namespace narrex::service {

namespace fs = std::filesystem;

struct SessionStore::Session {
  std::string id;
  std::mutex mutex;
  std::shared_ptr<const ExplanatorySpace> space;
  Exploration state;
  std::vector<Event> events;
  std::unique_ptr<EventLog> log;
};

namespace {

bool valid_id(const std::string& id) {
  return !id.empty() && id.size() <= 64 &&
         std::all_of(id.begin(), id.end(), [](char c) { return std::isxdigit(static_cast<unsigned char>(c)); });
}

Error unknown_session(const std::string& id) {
  return Error("unknown-session", "no session '" + id + "'", id);
}

void write_durably(const fs::path& path, const std::string& content) {
  int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  bool ok = fd >= 0;
  std::size_t done = 0;
  while (ok && done < content.size()) {
    ssize_t n = ::write(fd, content.data() + done, content.size() - done);
    ok = n > 0;
    if (ok) done += static_cast<std::size_t>(n);
  }
  ok = ok && ::fsync(fd) == 0;
  if (fd >= 0) ::close(fd);
  if (!ok) throw Error("storage-error", "cannot write " + path.string(), path.string());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("storage-error", "cannot read " + path.string(), path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::shared_ptr<const ExplanatorySpace> build_space(ExplanandumBundle bundle, HeuristicOrder order) {
  auto shared = std::make_shared<const ExplanandumBundle>(std::move(bundle));
  Derivation derivation = derive(*shared);
  return std::make_shared<const ExplanatorySpace>(shared, std::move(derivation), order);
}

}  // namespace

SessionStore::SessionStore(fs::path root, HeuristicOrder order) : root_(std::move(root)), order_(order) {
  std::error_code ec;
  fs::create_directories(root_, ec);
  if (ec) throw Error("storage-error", "cannot create storage directory " + root_.string(), ec.message());
}

SessionStore::~SessionStore() = default;

std::string SessionStore::fresh_id() {
  static thread_local std::mt19937_64 rng{std::random_device{}()};
  for (;;) {
    std::ostringstream out;
    out << std::hex;
    out.width(16);
    out.fill('0');
    out << rng();
    std::string id = out.str();
    if (!sessions_.count(id) && !fs::exists(root_ / id)) return id;
  }
}

CreateResult SessionStore::create(const CreateRequest& request) {
  ExplanandumBundle bundle = request.bundle.is_string() ? parse_bundle(request.bundle.get<std::string>())
                                                        : bundle_from_json(request.bundle);
  if (request.mode) bundle.overview.mode = *request.mode;
  std::vector<Violation> warnings = validate_explainability(bundle);

  auto session = std::make_shared<Session>();
  session->space = build_space(bundle, order_);
  session->state = begin_exploration(*session->space, request.goal);

  std::lock_guard lock(mutex_);
  session->id = fresh_id();
  fs::path dir = root_ / session->id;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("storage-error", "cannot create session directory " + dir.string(), ec.message());
  write_durably(dir / "bundle.json", serialize_bundle(bundle) + "\n");
  nlohmann::json meta = {{"id", session->id},
                         {"goal", request.goal},
                         {"heuristic_order", to_string(order_)},
                         {"created_at", utc_timestamp()}};
  write_durably(dir / "meta.json", meta.dump(2) + "\n");
  session->log = std::make_unique<EventLog>(dir / "events.jsonl");
  sessions_[session->id] = session;
  return CreateResult{session->id, std::move(warnings)};
}

std::shared_ptr<SessionStore::Session> SessionStore::load(const std::string& id) {
  fs::path dir = root_ / id;
  if (!fs::exists(dir / "meta.json") || !fs::exists(dir / "bundle.json")) return nullptr;
  nlohmann::json meta = nlohmann::json::parse(read_file(dir / "meta.json"));
  auto session = std::make_shared<Session>();
  session->id = id;
  session->space = build_space(parse_bundle(read_file(dir / "bundle.json")),
                               parse_heuristic_order(meta.at("heuristic_order").get<std::string>()));
  session->state = begin_exploration(*session->space, meta.value("goal", std::string()));
  session->events = EventLog::read(dir / "events.jsonl");
  for (const Event& e : session->events) session->state = narrex::apply(*session->space, session->state, e.interaction);
  session->log = std::make_unique<EventLog>(dir / "events.jsonl");
  return session;
}

std::shared_ptr<SessionStore::Session> SessionStore::find(const std::string& id) {
  if (!valid_id(id)) throw unknown_session(id);
  std::lock_guard lock(mutex_);
  if (auto it = sessions_.find(id); it != sessions_.end()) return it->second;
  auto session = load(id);
  if (!session) throw unknown_session(id);
  sessions_[id] = session;
  return session;
}

ApplyResult SessionStore::apply(const std::string& id, const Interaction& interaction) {
  auto session = find(id);
  std::lock_guard lock(session->mutex);
  Exploration next = narrex::apply(*session->space, session->state, interaction);
  Event event{session->events.size() + 1, utc_timestamp(), interaction};
  session->log->append(event);
  session->events.push_back(std::move(event));

  ApplyResult result;
  for (std::size_t i = session->state.explanans.nodes.size(); i < next.explanans.nodes.size(); ++i) {
    result.appended.push_back(next.explanans.nodes[i]);
  }
  if (next.narrative.arguments.size() > session->state.narrative.arguments.size()) {
    result.argument = next.narrative.arguments.back();
  }
  session->state = std::move(next);
  result.explanans_size = session->state.explanans.nodes.size();
  result.actions = session->space->available_actions(session->state.explanans);
  return result;
}

nlohmann::json SessionStore::snapshot(const std::string& id) {
  auto session = find(id);
  std::lock_guard lock(session->mutex);
  const ExplanandumBundle& b = session->space->bundle();
  return {{"id", session->id},
          {"bundle_id", b.overview.id},
          {"mode", std::string(to_string(b.overview.mode))},
          {"goal", session->state.narrative.goal},
          {"heuristic_order", to_string(session->space->heuristic_order())},
          {"explanans", to_json(session->state.explanans)},
          {"narrative", narrative_to_json(session->state.narrative, session->state.explanans)}};
}

std::vector<CandidateAction> SessionStore::actions(const std::string& id) {
  auto session = find(id);
  std::lock_guard lock(session->mutex);
  return session->space->available_actions(session->state.explanans);
}

std::string SessionStore::export_narrative(const std::string& id, ExportFormat format) {
  auto session = find(id);
  std::lock_guard lock(session->mutex);
  return narrex::export_narrative(session->state.narrative, session->state.explanans, format);
}

std::vector<Event> SessionStore::events(const std::string& id) {
  auto session = find(id);
  std::lock_guard lock(session->mutex);
  return session->events;
}

}  // namespace narrex::service
