#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "narrex/exploration.hpp"
#include "narrex/service/event_log.hpp"
#include "narrex/space.hpp"
#include "narrex/validation.hpp"

namespace narrex::service {

struct CreateRequest {
  /// Bundle document: a JSON object, or a string holding the JSON text.
  nlohmann::json bundle;
  std::optional<ExplanationMode> mode;
  std::string goal;
};

struct CreateResult {
  std::string id;
  std::vector<Violation> warnings;
};

struct ApplyResult {
  std::vector<InfoNode> appended;
  std::optional<Argument> argument;
  std::size_t explanans_size = 0;
  std::vector<CandidateAction> actions;
};

/// Sessions persisted as <root>/<id>/{bundle.json, meta.json, events.jsonl}.
/// Sessions not in memory are rebuilt on first access by replaying their
/// log. Operations on one session are serialised by a per-session mutex.
class SessionStore {
 public:
  SessionStore(std::filesystem::path root, HeuristicOrder order = kDefaultHeuristicOrder);
  ~SessionStore();

  /// Throws BundleError for unparsable bundles, ReasoningError for
  /// non-derivable theories, Error("missing-decision") for ex-post bundles
  /// without a decision, Error("storage-error").
  CreateResult create(const CreateRequest& request);

  /// Throws Error("unknown-session"), InteractionError, MutationError.
  ApplyResult apply(const std::string& id, const Interaction& interaction);

  nlohmann::json snapshot(const std::string& id);
  std::vector<CandidateAction> actions(const std::string& id);
  std::string export_narrative(const std::string& id, ExportFormat format);
  std::vector<Event> events(const std::string& id);

  const std::filesystem::path& root() const { return root_; }

 private:
  struct Session;
  std::shared_ptr<Session> find(const std::string& id);
  std::shared_ptr<Session> load(const std::string& id);
  std::string fresh_id();

  std::filesystem::path root_;
  HeuristicOrder order_;
  std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
};

}  // namespace narrex::service
