#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tracecheck/graph.hpp"
#include "tracecheck/property.hpp"

namespace tracecheck {

// Lowercase hex SHA-256 of the given bytes.
std::string sha256_hex(std::string_view bytes);
bool is_content_hash(std::string_view s);

// Directory of blobs named by the SHA-256 of their contents.
class ContentStore {
 public:
  explicit ContentStore(std::filesystem::path dir);

  std::string put(std::string_view bytes);
  std::string get(std::string_view hash) const;  // Error(NotFound) if absent
  bool contains(std::string_view hash) const;
  std::vector<std::string> keys() const;
  // Keys whose stored bytes no longer hash to the key.
  std::vector<std::string> corrupted() const;

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
};

enum class LiabilityStatus { Created, ResultSubmitted, Confirmed, Rejected };
enum class EventKind { LiabilityCreated, ResultSubmitted, Verdict };
enum class Verdict { Confirmed, Rejected };

const char* status_name(LiabilityStatus s);
const char* event_kind_name(EventKind k);
const char* verdict_name(Verdict v);

struct LedgerEvent {
  std::uint64_t seq = 0;
  EventKind kind = EventKind::LiabilityCreated;
  std::uint64_t id = 0;
  // LiabilityCreated
  std::string promisor;
  std::string promisee;
  std::string model_hash;
  std::string objective_hash;
  // ResultSubmitted
  std::string result_hash;
  // Verdict
  Verdict verdict = Verdict::Rejected;
  std::string reason;

  std::string to_json_line() const;
  static LedgerEvent from_json_line(std::string_view line);
};

struct Liability {
  std::uint64_t id = 0;
  std::string promisor;
  std::string promisee;
  std::string model_hash;
  std::string objective_hash;
  std::optional<std::string> result_hash;
  LiabilityStatus status = LiabilityStatus::Created;
  std::optional<std::string> reason;  // set with the verdict
};

// Append-only JSON-lines event log. Every appended or loaded event is checked
// against the liability state machine before it is accepted.
class Ledger {
 public:
  explicit Ledger(std::filesystem::path file);

  // Picks up events appended to the file by another writer.
  void refresh();

  std::uint64_t create(std::string promisor, std::string promisee, std::string model_hash,
                       std::string objective_hash);
  void submit(std::uint64_t id, std::string result_hash);
  void record_verdict(std::uint64_t id, Verdict verdict, std::string reason);

  const std::vector<LedgerEvent>& events() const { return events_; }
  const Liability& liability(std::uint64_t id) const;  // Error(NotFound)
  bool has(std::uint64_t id) const { return id >= 1 && id <= liabilities_.size(); }
  const std::vector<Liability>& liabilities() const { return liabilities_; }
  const std::filesystem::path& file() const { return file_; }

 private:
  void apply(const LedgerEvent& e);  // validates and folds into liabilities_
  void append(LedgerEvent e);

  std::filesystem::path file_;
  std::vector<LedgerEvent> events_;
  std::vector<Liability> liabilities_;  // index id-1
};

struct ValidationOptions {
  PropertyType type = PropertyType::Strong;
  BaseMode base = BaseMode::Faithful;
  std::size_t max_states = kDefaultStateBudget;
};

struct ValidationOutcome {
  Verdict verdict = Verdict::Rejected;
  // "conforms", "property-fails", "model-parse-error", "log-parse-error",
  // "variable-mismatch", "model-error", "state-explosion"
  std::string reason;
  std::string detail;
  std::size_t states = 0;
  std::size_t edges = 0;
};

// The verdict computation on its own: parse model and log, build the state
// graph, generate the property and check it. Never throws for bad inputs.
ValidationOutcome evaluate_result(std::string_view model_text, std::string_view log_text,
                                  const ValidationOptions& options);

struct ValidatorRunOptions {
  ValidationOptions validation;
  bool watch = false;
  std::chrono::milliseconds poll_interval{500};
  std::function<bool()> should_stop;  // polled between rounds in watch mode
  std::function<void(std::uint64_t id, const ValidationOutcome&)> on_verdict;
};

struct ReplayEntry {
  std::uint64_t id = 0;
  Verdict recorded = Verdict::Rejected;
  std::string recorded_reason;
  ValidationOutcome derived;
  bool agrees = false;
};

struct ValidatorSummary {
  std::size_t processed = 0;
  std::size_t rejected = 0;
};

// Ledger + content store + validator.
class Lifecycle {
 public:
  Lifecycle(std::filesystem::path ledger_file, std::filesystem::path store_dir);

  ContentStore& store() { return store_; }
  Ledger& ledger() { return ledger_; }

  std::uint64_t create_liability(std::string promisor, std::string promisee, std::string model_hash,
                                 std::string objective_hash);
  void submit_result(std::uint64_t id, std::string result_hash);

  // Requires status ResultSubmitted; appends exactly one Verdict event.
  ValidationOutcome validate(std::uint64_t id, const ValidationOptions& options = {});

  // Validates every liability with a submitted result and no verdict, in
  // ledger order. In watch mode keeps polling until should_stop() is true.
  ValidatorSummary run_validator(const ValidatorRunOptions& options);

  // Re-derives the verdict of every decided liability from the stored
  // artifacts without touching the ledger.
  std::vector<ReplayEntry> replay(const ValidationOptions& options = {});

 private:
  ValidationOutcome evaluate_stored(const Liability& l, const ValidationOptions& options) const;

  ContentStore store_;
  Ledger ledger_;
};

}  // namespace tracecheck
