#include "tracecheck/lifecycle.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "tracecheck/error.hpp"
#include "tracecheck/lang.hpp"

namespace tracecheck {

namespace fs = std::filesystem;

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorKind::Io, "SHA-256 computation failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

bool is_content_hash(std::string_view s) {
  return s.size() == 64 &&
         std::all_of(s.begin(), s.end(), [](char c) { return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'); });
}

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

ContentStore::ContentStore(fs::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec || !fs::is_directory(dir_)) throw Error(ErrorKind::Io, "cannot create store directory " + dir_.string());
}

std::string ContentStore::put(std::string_view bytes) {
  std::string hash = sha256_hex(bytes);
  const fs::path target = dir_ / hash;
  if (fs::exists(target)) return hash;
  const fs::path tmp = dir_ / (hash + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorKind::Io, "cannot write " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot store blob " + hash + ": " + ec.message());
  return hash;
}

std::string ContentStore::get(std::string_view hash) const {
  if (!contains(hash)) throw Error(ErrorKind::NotFound, "unknown content hash " + std::string(hash));
  return read_file(dir_ / std::string(hash));
}

bool ContentStore::contains(std::string_view hash) const {
  return is_content_hash(hash) && fs::is_regular_file(dir_ / std::string(hash));
}

std::vector<std::string> ContentStore::keys() const {
  std::vector<std::string> out;
  for (const auto& entry : fs::directory_iterator(dir_)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && is_content_hash(name)) out.push_back(name);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> ContentStore::corrupted() const {
  std::vector<std::string> out;
  for (const auto& key : keys()) {
    if (sha256_hex(read_file(dir_ / key)) != key) out.push_back(key);
  }
  return out;
}

const char* status_name(LiabilityStatus s) {
  switch (s) {
    case LiabilityStatus::Created: return "Created";
    case LiabilityStatus::ResultSubmitted: return "ResultSubmitted";
    case LiabilityStatus::Confirmed: return "Confirmed";
    case LiabilityStatus::Rejected: return "Rejected";
  }
  return "?";
}

const char* event_kind_name(EventKind k) {
  switch (k) {
    case EventKind::LiabilityCreated: return "LiabilityCreated";
    case EventKind::ResultSubmitted: return "ResultSubmitted";
    case EventKind::Verdict: return "Verdict";
  }
  return "?";
}

const char* verdict_name(Verdict v) { return v == Verdict::Confirmed ? "Confirmed" : "Rejected"; }

std::string LedgerEvent::to_json_line() const {
  nlohmann::ordered_json j;
  j["seq"] = seq;
  j["kind"] = event_kind_name(kind);
  j["id"] = id;
  switch (kind) {
    case EventKind::LiabilityCreated:
      j["promisor"] = promisor;
      j["promisee"] = promisee;
      j["model_hash"] = model_hash;
      j["objective_hash"] = objective_hash;
      break;
    case EventKind::ResultSubmitted:
      j["result_hash"] = result_hash;
      break;
    case EventKind::Verdict:
      j["verdict"] = verdict_name(verdict);
      j["reason"] = reason;
      break;
  }
  return j.dump();
}

LedgerEvent LedgerEvent::from_json_line(std::string_view line) {
  LedgerEvent e;
  try {
    const auto j = nlohmann::json::parse(line);
    e.seq = j.at("seq").get<std::uint64_t>();
    e.id = j.at("id").get<std::uint64_t>();
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "LiabilityCreated") {
      e.kind = EventKind::LiabilityCreated;
      e.promisor = j.at("promisor").get<std::string>();
      e.promisee = j.at("promisee").get<std::string>();
      e.model_hash = j.at("model_hash").get<std::string>();
      e.objective_hash = j.at("objective_hash").get<std::string>();
    } else if (kind == "ResultSubmitted") {
      e.kind = EventKind::ResultSubmitted;
      e.result_hash = j.at("result_hash").get<std::string>();
    } else if (kind == "Verdict") {
      e.kind = EventKind::Verdict;
      const auto v = j.at("verdict").get<std::string>();
      if (v != "Confirmed" && v != "Rejected") throw Error(ErrorKind::Parse, "unknown verdict '" + v + "'");
      e.verdict = v == "Confirmed" ? Verdict::Confirmed : Verdict::Rejected;
      e.reason = j.at("reason").get<std::string>();
    } else {
      throw Error(ErrorKind::Parse, "unknown event kind '" + kind + "'");
    }
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::Parse, std::string("malformed ledger event: ") + ex.what());
  }
  return e;
}

Ledger::Ledger(fs::path file) : file_(std::move(file)) {
  if (file_.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(file_.parent_path(), ec);
  }
  refresh();
}

void Ledger::refresh() {
  if (!fs::exists(file_)) return;
  std::ifstream in(file_);
  if (!in) throw Error(ErrorKind::Io, "cannot read ledger " + file_.string());
  std::string line;
  std::size_t index = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (index++ < events_.size()) continue;
    LedgerEvent e = LedgerEvent::from_json_line(line);
    apply(e);
    events_.push_back(std::move(e));
  }
}

const Liability& Ledger::liability(std::uint64_t id) const {
  if (!has(id)) throw Error(ErrorKind::NotFound, "unknown liability " + std::to_string(id));
  return liabilities_[id - 1];
}

void Ledger::apply(const LedgerEvent& e) {
  // Strictly increasing; gaps are allowed so a ledger stays valid after
  // events are filtered out of it (e.g. verdicts stripped for re-validation).
  const std::uint64_t min_seq = events_.empty() ? 1 : events_.back().seq + 1;
  if (e.seq < min_seq) {
    throw Error(ErrorKind::WrongStatus, "ledger event seq " + std::to_string(e.seq) + ", expected at least " +
                                            std::to_string(min_seq));
  }
  switch (e.kind) {
    case EventKind::LiabilityCreated: {
      if (e.id != liabilities_.size() + 1) {
        throw Error(ErrorKind::WrongStatus, "liability id " + std::to_string(e.id) + " is not the next fresh id");
      }
      Liability l;
      l.id = e.id;
      l.promisor = e.promisor;
      l.promisee = e.promisee;
      l.model_hash = e.model_hash;
      l.objective_hash = e.objective_hash;
      liabilities_.push_back(std::move(l));
      break;
    }
    case EventKind::ResultSubmitted: {
      if (!has(e.id)) throw Error(ErrorKind::NotFound, "unknown liability " + std::to_string(e.id));
      Liability& l = liabilities_[e.id - 1];
      if (l.status != LiabilityStatus::Created) {
        throw Error(ErrorKind::WrongStatus, "wrong status: liability " + std::to_string(e.id) + " is " +
                                                status_name(l.status) + ", expected Created");
      }
      l.result_hash = e.result_hash;
      l.status = LiabilityStatus::ResultSubmitted;
      break;
    }
    case EventKind::Verdict: {
      if (!has(e.id)) throw Error(ErrorKind::NotFound, "unknown liability " + std::to_string(e.id));
      Liability& l = liabilities_[e.id - 1];
      if (l.status != LiabilityStatus::ResultSubmitted) {
        throw Error(ErrorKind::WrongStatus, "wrong status: liability " + std::to_string(e.id) + " is " +
                                                status_name(l.status) + ", expected ResultSubmitted");
      }
      l.status = e.verdict == Verdict::Confirmed ? LiabilityStatus::Confirmed : LiabilityStatus::Rejected;
      l.reason = e.reason;
      break;
    }
  }
}

void Ledger::append(LedgerEvent e) {
  refresh();
  e.seq = events_.empty() ? 1 : events_.back().seq + 1;
  apply(e);  // throws before anything is written
  std::ofstream out(file_, std::ios::app);
  out << e.to_json_line() << '\n';
  out.flush();
  if (!out) throw Error(ErrorKind::Io, "cannot append to ledger " + file_.string());
  events_.push_back(std::move(e));
}

std::uint64_t Ledger::create(std::string promisor, std::string promisee, std::string model_hash,
                             std::string objective_hash) {
  refresh();
  LedgerEvent e;
  e.kind = EventKind::LiabilityCreated;
  e.id = liabilities_.size() + 1;
  e.promisor = std::move(promisor);
  e.promisee = std::move(promisee);
  e.model_hash = std::move(model_hash);
  e.objective_hash = std::move(objective_hash);
  const std::uint64_t id = e.id;
  append(std::move(e));
  return id;
}

void Ledger::submit(std::uint64_t id, std::string result_hash) {
  LedgerEvent e;
  e.kind = EventKind::ResultSubmitted;
  e.id = id;
  e.result_hash = std::move(result_hash);
  append(std::move(e));
}

void Ledger::record_verdict(std::uint64_t id, Verdict verdict, std::string reason) {
  LedgerEvent e;
  e.kind = EventKind::Verdict;
  e.id = id;
  e.verdict = verdict;
  e.reason = std::move(reason);
  append(std::move(e));
}

ValidationOutcome evaluate_result(std::string_view model_text, std::string_view log_text,
                                  const ValidationOptions& options) {
  ValidationOutcome out;
  auto reject = [&](std::string reason, std::string detail) {
    out.verdict = Verdict::Rejected;
    out.reason = std::move(reason);
    out.detail = std::move(detail);
    return out;
  };

  SystemModel model;
  try {
    model = parse_model(model_text);
  } catch (const Error& e) {
    return reject("model-parse-error", e.what());
  }
  ExecutionLog log;
  try {
    log = parse_log(log_text);
  } catch (const Error& e) {
    return reject("log-parse-error", e.what());
  }

  std::vector<std::string> model_vars;
  for (const auto& v : model.variables) model_vars.push_back(v.name);
  std::vector<std::string> log_vars = log.variables;
  std::sort(model_vars.begin(), model_vars.end());
  std::sort(log_vars.begin(), log_vars.end());
  if (model_vars != log_vars) {
    std::string detail = "log columns {";
    for (std::size_t i = 0; i < log.variables.size(); ++i) detail += (i ? "," : "") + log.variables[i];
    detail += "} do not match model variables {";
    for (std::size_t i = 0; i < model.variables.size(); ++i) detail += (i ? "," : "") + model.variables[i].name;
    return reject("variable-mismatch", detail + "}");
  }

  StateGraph graph;
  try {
    graph = build_graph(model, options.max_states);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::StateExplosion) return reject("state-explosion", e.what());
    return reject("model-error", e.what());
  }
  out.states = graph.state_count();
  out.edges = graph.edge_count();

  const FormulaPtr property = log_property(log, options.type, options.base);
  const CheckResult result = holds_initially(graph, *property);
  if (!result.holds) {
    std::string detail;
    for (const auto& d : result.diagnostics) detail += (detail.empty() ? "" : "; ") + d;
    return reject("property-fails", detail);
  }
  out.verdict = Verdict::Confirmed;
  out.reason = "conforms";
  return out;
}

ValidationOutcome Lifecycle::evaluate_stored(const Liability& l, const ValidationOptions& options) const {
  std::string model_text;
  std::string log_text;
  try {
    model_text = store_.get(l.model_hash);
    log_text = store_.get(l.result_hash.value_or(""));
  } catch (const Error& e) {
    ValidationOutcome outcome;
    outcome.reason = "missing-artifact";
    outcome.detail = e.what();
    return outcome;
  }
  return evaluate_result(model_text, log_text, options);
}

Lifecycle::Lifecycle(fs::path ledger_file, fs::path store_dir)
    : store_(std::move(store_dir)), ledger_(std::move(ledger_file)) {}

std::uint64_t Lifecycle::create_liability(std::string promisor, std::string promisee, std::string model_hash,
                                          std::string objective_hash) {
  if (!store_.contains(model_hash)) throw Error(ErrorKind::NotFound, "model hash not in store: " + model_hash);
  if (!store_.contains(objective_hash)) {
    throw Error(ErrorKind::NotFound, "objective hash not in store: " + objective_hash);
  }
  return ledger_.create(std::move(promisor), std::move(promisee), std::move(model_hash), std::move(objective_hash));
}

void Lifecycle::submit_result(std::uint64_t id, std::string result_hash) {
  ledger_.refresh();
  ledger_.liability(id);
  if (!store_.contains(result_hash)) throw Error(ErrorKind::NotFound, "result hash not in store: " + result_hash);
  ledger_.submit(id, std::move(result_hash));
}

ValidationOutcome Lifecycle::validate(std::uint64_t id, const ValidationOptions& options) {
  ledger_.refresh();
  const Liability& l = ledger_.liability(id);
  if (l.status != LiabilityStatus::ResultSubmitted) {
    throw Error(ErrorKind::WrongStatus, "wrong status: liability " + std::to_string(id) + " is " +
                                            status_name(l.status) + ", expected ResultSubmitted");
  }
  const ValidationOutcome outcome = evaluate_stored(l, options);
  ledger_.record_verdict(id, outcome.verdict, outcome.reason);
  return outcome;
}

ValidatorSummary Lifecycle::run_validator(const ValidatorRunOptions& options) {
  ValidatorSummary summary;
  while (true) {
    ledger_.refresh();
    std::vector<std::uint64_t> pending;
    for (const auto& e : ledger_.events()) {
      if (e.kind == EventKind::ResultSubmitted &&
          ledger_.liability(e.id).status == LiabilityStatus::ResultSubmitted) {
        pending.push_back(e.id);
      }
    }
    for (std::uint64_t id : pending) {
      ValidationOutcome outcome = validate(id, options.validation);
      ++summary.processed;
      if (outcome.verdict == Verdict::Rejected) ++summary.rejected;
      if (options.on_verdict) options.on_verdict(id, outcome);
    }
    if (!options.watch) break;
    if (options.should_stop && options.should_stop()) break;
    std::this_thread::sleep_for(options.poll_interval);
    if (options.should_stop && options.should_stop()) break;
  }
  return summary;
}

std::vector<ReplayEntry> Lifecycle::replay(const ValidationOptions& options) {
  ledger_.refresh();
  std::vector<ReplayEntry> out;
  for (const auto& e : ledger_.events()) {
    if (e.kind != EventKind::Verdict) continue;
    ReplayEntry entry;
    entry.id = e.id;
    entry.recorded = e.verdict;
    entry.recorded_reason = e.reason;
    entry.derived = evaluate_stored(ledger_.liability(e.id), options);
    entry.agrees = entry.derived.verdict == entry.recorded && entry.derived.reason == entry.recorded_reason;
    out.push_back(std::move(entry));
  }
  return out;
}

}  // namespace tracecheck
