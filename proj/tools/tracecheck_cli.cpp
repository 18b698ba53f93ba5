// tracecheck command-line front end. Talks to the library exclusively
// through the C API.
//
// Exit codes: 0 holds / Confirmed / success, 1 fails / Rejected, 2 usage,
// I/O or parse error.

#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "tracecheck/tracecheck.h"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFails = 1;
constexpr int kExitError = 2;

// Thrown for anything that must end the process with code 2.
struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw Failure("cannot write " + path);
}

void check(tc_status status, const std::string& what) {
  if (status != TC_OK) throw Failure(what + ": " + tc_last_error());
}

struct CString {
  char* p = nullptr;
  CString() = default;
  CString(const CString&) = delete;
  CString& operator=(const CString&) = delete;
  ~CString() { tc_string_free(p); }
  char** out() { return &p; }
  std::string str() const { return p ? std::string(p) : std::string(); }
};

template <typename T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(p); }
  T** out() { return &p; }
};

using Model = Handle<tc_model, tc_model_free>;
using Graph = Handle<tc_graph, tc_graph_free>;
using Formula = Handle<tc_formula, tc_formula_free>;
using Log = Handle<tc_log, tc_log_free>;
using Workspace = Handle<tc_workspace, tc_workspace_free>;

tc_property_type property_type(const std::string& s) { return s == "weak" ? TC_WEAK : TC_STRONG; }
tc_base_mode base_mode(const std::string& s) { return s == "corrected" ? TC_BASE_CORRECTED : TC_BASE_FAITHFUL; }
const char* verdict_text(tc_verdict v) { return v == TC_CONFIRMED ? "Confirmed" : "Rejected"; }

void print_warnings(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) std::cerr << "warning: " << line << "\n";
  }
}

std::string store_put(tc_workspace* ws, const std::string& bytes) {
  char hash[65];
  check(tc_store_put(ws, bytes.data(), bytes.size(), hash), "store");
  return hash;
}

volatile std::sig_atomic_t g_interrupted = 0;
extern "C" void on_sigint(int) { g_interrupted = 1; }
int should_stop(void*) { return g_interrupted ? 1 : 0; }

struct VerdictTally {
  std::ostream* out;
};

void report_verdict(uint64_t id, tc_verdict verdict, const char* reason, const char* detail, void* user) {
  auto* tally = static_cast<VerdictTally*>(user);
  *tally->out << "liability " << id << ": " << verdict_text(verdict) << " (" << reason << ")\n";
  if (verdict == TC_REJECTED && detail && *detail) std::cerr << "  " << detail << "\n";
  tally->out->flush();
}

struct Options {
  std::string template_file, settings_file, bindings_file, output;
  std::string log_file, type = "strong", base = "faithful";
  std::string model_file, property_file;
  std::string ledger, store, objective_file, promisor, promisee, town_file, fault;
  std::string workspace, out_dir;
  uint64_t liability = 0;
  uint64_t max_states = 0;
  bool watch = false;
  bool with_unused = false;
};

int cmd_gen_model(const Options& o) {
  const std::string tmpl = read_file(o.template_file);
  const std::string settings = o.settings_file.empty() ? std::string() : read_file(o.settings_file);
  const std::string bindings = o.bindings_file.empty() ? std::string() : read_file(o.bindings_file);
  CString text;
  check(tc_render_template(tmpl.c_str(), o.settings_file.empty() ? nullptr : settings.c_str(),
                           o.bindings_file.empty() ? nullptr : bindings.c_str(), text.out()),
        "gen-model");
  write_output(o.output, text.str());
  return kExitOk;
}

int cmd_gen_property(const Options& o) {
  const std::string csv = read_file(o.log_file);
  Log log;
  check(tc_log_parse(csv.c_str(), log.out()), o.log_file);
  Formula f;
  CString warning;
  check(tc_property_generate(log.p, property_type(o.type), base_mode(o.base), f.out(), warning.out()),
        "gen-property");
  print_warnings(warning.str());
  CString text;
  check(tc_formula_print(f.p, text.out()), "gen-property");
  write_output(o.output, text.str() + "\n");
  return kExitOk;
}

int cmd_check(const Options& o) {
  const std::string model_text = read_file(o.model_file);
  const std::string property_text = read_file(o.property_file);
  Model model;
  check(tc_model_parse(model_text.c_str(), model.out()), o.model_file);
  Formula f;
  check(tc_formula_parse(property_text.c_str(), f.out()), o.property_file);
  Graph g;
  check(tc_graph_build(model.p, o.max_states, g.out()), "check");
  int holds = 0;
  CString diag;
  check(tc_check(g.p, f.p, &holds, diag.out()), "check");
  std::cout << (holds ? "holds" : "fails") << " (states: " << tc_graph_state_count(g.p)
            << ", edges: " << tc_graph_edge_count(g.p) << ")\n";
  if (!holds) std::cerr << diag.str();
  return holds ? kExitOk : kExitFails;
}

int cmd_order(const Options& o) {
  const std::string model_text = read_file(o.model_file);
  const std::string objective = read_file(o.objective_file);
  Model model;
  check(tc_model_parse(model_text.c_str(), model.out()), o.model_file);
  Workspace ws;
  check(tc_workspace_open(o.ledger.c_str(), o.store.c_str(), ws.out()), "workspace");
  const std::string model_hash = store_put(ws.p, model_text);
  const std::string objective_hash = store_put(ws.p, objective);
  uint64_t id = 0;
  check(tc_liability_create(ws.p, o.promisor.c_str(), o.promisee.c_str(), model_hash.c_str(), objective_hash.c_str(),
                            &id),
        "order");
  std::cout << id << "\n";
  return kExitOk;
}

int cmd_execute(const Options& o) {
  const std::string town = read_file(o.town_file);
  Workspace ws;
  check(tc_workspace_open(o.ledger.c_str(), o.store.c_str(), ws.out()), "workspace");
  tc_liability_info info{};
  check(tc_liability_get(ws.p, o.liability, &info), "execute");
  if (info.status != TC_STATUS_CREATED) {
    throw Failure("execute: wrong status: liability " + std::to_string(o.liability) + " already has a result");
  }
  CString objective;
  check(tc_store_get(ws.p, info.objective_hash, objective.out(), nullptr), "execute");
  CString csv, warnings;
  check(tc_town_simulate(town.c_str(), objective.p, o.fault.c_str(), csv.out(), warnings.out()), "execute");
  print_warnings(warnings.str());
  const std::string result_hash = store_put(ws.p, csv.str());
  check(tc_liability_submit(ws.p, o.liability, result_hash.c_str()), "execute");
  std::cout << "liability " << o.liability << ": result " << result_hash << " submitted\n";
  return kExitOk;
}

int cmd_validate(const Options& o) {
  Workspace ws;
  check(tc_workspace_open(o.ledger.c_str(), o.store.c_str(), ws.out()), "workspace");
  if (o.liability != 0) {
    tc_verdict verdict = TC_REJECTED;
    CString reason, detail;
    check(tc_liability_validate(ws.p, o.liability, property_type(o.type), base_mode(o.base), &verdict,
                                reason.out(), detail.out()),
          "validate");
    VerdictTally tally{&std::cout};
    report_verdict(o.liability, verdict, reason.p, detail.p, &tally);
    std::cout << "1 processed, " << (verdict == TC_REJECTED ? 1 : 0) << " rejected\n";
    return verdict == TC_CONFIRMED ? kExitOk : kExitFails;
  }
  VerdictTally tally{&std::cout};
  tc_validator_options opts{};
  opts.type = property_type(o.type);
  opts.base = base_mode(o.base);
  opts.watch = o.watch ? 1 : 0;
  opts.on_verdict = report_verdict;
  opts.user = &tally;
  if (o.watch) {
    std::signal(SIGINT, on_sigint);
    std::signal(SIGTERM, on_sigint);
    opts.should_stop = should_stop;
  }
  uint64_t processed = 0, rejected = 0;
  check(tc_validator_run(ws.p, &opts, &processed, &rejected), "validate");
  std::cout << processed << " processed, " << rejected << " rejected\n";
  return rejected == 0 ? kExitOk : kExitFails;
}

int cmd_replay(const Options& o) {
  Workspace ws;
  check(tc_workspace_open(o.ledger.c_str(), o.store.c_str(), ws.out()), "workspace");
  VerdictTally tally{&std::cout};
  uint64_t checked = 0, mismatches = 0;
  check(tc_replay(ws.p, property_type(o.type), base_mode(o.base), report_verdict, &tally, &checked, &mismatches),
        "replay");
  std::cout << checked << " replayed, " << mismatches << " mismatched\n";
  return mismatches == 0 ? kExitOk : kExitFails;
}

int cmd_town_bindings(const Options& o) {
  const std::string town = read_file(o.town_file);
  const std::string objective = read_file(o.objective_file);
  CString tmpl, settings, bindings;
  check(tc_town_bindings(town.c_str(), objective.c_str(), o.with_unused ? 1 : 0, tmpl.out(), settings.out(),
                         bindings.out()),
        "town-bindings");
  std::error_code ec;
  fs::create_directories(o.out_dir, ec);
  if (ec) throw Failure("cannot create " + o.out_dir);
  write_output((fs::path(o.out_dir) / "town.gcmt").string(), tmpl.str());
  write_output((fs::path(o.out_dir) / "settings.yaml").string(), settings.str());
  write_output((fs::path(o.out_dir) / "bindings.json").string(), bindings.str());
  return kExitOk;
}

int cmd_simulate(const Options& o) {
  const std::string town = read_file(o.town_file);
  const std::string objective = read_file(o.objective_file);
  CString csv, warnings;
  check(tc_town_simulate(town.c_str(), objective.c_str(), o.fault.c_str(), csv.out(), warnings.out()), "simulate");
  print_warnings(warnings.str());
  write_output(o.output, csv.str());
  return kExitOk;
}

int cmd_demo(const Options& o) {
  const std::string town = read_file(o.town_file);
  const std::string objective = read_file(o.objective_file);

  fs::path dir;
  const bool temporary = o.workspace.empty();
  if (temporary) {
    std::string pattern = (fs::temp_directory_path() / "tracecheck-demo-XXXXXX").string();
    if (!mkdtemp(pattern.data())) throw Failure("cannot create a temporary workspace");
    dir = pattern;
  } else {
    dir = o.workspace;
  }
  struct Cleanup {
    fs::path dir;
    bool active;
    ~Cleanup() {
      std::error_code ec;
      if (active) fs::remove_all(dir, ec);
    }
  } cleanup{dir, temporary};

  const std::string ledger = (dir / "ledger.jsonl").string();
  const std::string store = (dir / "store").string();
  Workspace ws;
  check(tc_workspace_open(ledger.c_str(), store.c_str(), ws.out()), "workspace");
  std::cout << "workspace: " << dir.string() << (temporary ? " (temporary)" : "") << "\n";

  CString model;
  check(tc_town_model(town.c_str(), objective.c_str(), 0, model.out()), "demo");
  const std::string model_hash = store_put(ws.p, model.str());
  const std::string objective_hash = store_put(ws.p, objective);
  const std::string promisor = o.promisor.empty() ? "0x0000000000000000000000000000000000000b07" : o.promisor;
  const std::string promisee = o.promisee.empty() ? "0x00000000000000000000000000000000000c0de" : o.promisee;
  uint64_t id = 0;
  check(tc_liability_create(ws.p, promisor.c_str(), promisee.c_str(), model_hash.c_str(), objective_hash.c_str(), &id),
        "order");
  std::cout << "order: liability " << id << " created (model " << model_hash.substr(0, 12) << ", objective "
            << objective_hash.substr(0, 12) << ")\n";

  CString csv, warnings;
  check(tc_town_simulate(town.c_str(), objective.c_str(), o.fault.c_str(), csv.out(), warnings.out()), "execute");
  print_warnings(warnings.str());
  const std::string result_hash = store_put(ws.p, csv.str());
  check(tc_liability_submit(ws.p, id, result_hash.c_str()), "execute");
  Log log;
  check(tc_log_parse(csv.p, log.out()), "execute");
  std::cout << "execute: " << tc_log_row_count(log.p) << " log rows submitted as " << result_hash.substr(0, 12)
            << (o.fault.empty() ? "" : " (fault " + o.fault + ")") << "\n";

  tc_verdict verdict = TC_REJECTED;
  CString reason, detail;
  check(tc_liability_validate(ws.p, id, property_type(o.type), base_mode(o.base), &verdict, reason.out(),
                              detail.out()),
        "validate");
  std::cout << "validate (" << o.type << "/" << o.base << "): liability " << id << " " << verdict_text(verdict)
            << " (" << reason.str() << ")\n";
  if (verdict == TC_REJECTED && !detail.str().empty()) std::cerr << "  " << detail.str() << "\n";
  return verdict == TC_CONFIRMED ? kExitOk : kExitFails;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tracecheck: validate execution logs against guarded-command behaviour models"};
  app.require_subcommand(1);
  Options o;

  auto add_mode = [&](CLI::App* sub) {
    sub->add_option("--type", o.type, "Property type")->check(CLI::IsMember({"strong", "weak"}));
    sub->add_option("--base", o.base, "Base case of the recursion")->check(CLI::IsMember({"faithful", "corrected"}));
  };
  auto add_workspace = [&](CLI::App* sub) {
    sub->add_option("--ledger", o.ledger, "Ledger file (JSON lines)")->required();
    sub->add_option("--store", o.store, "Content store directory")->required();
  };

  auto* gen_model = app.add_subcommand("gen-model", "Render a model template");
  gen_model->add_option("--template", o.template_file, "Template (.gcmt)")->required();
  gen_model->add_option("--settings", o.settings_file, "Settings (.yaml)");
  gen_model->add_option("--bindings", o.bindings_file, "Bindings (.json)");
  gen_model->add_option("-o,--output", o.output, "Output model (.gcm); stdout if omitted");

  auto* gen_property = app.add_subcommand("gen-property", "Compile a log into a CTL property");
  gen_property->add_option("--log", o.log_file, "Execution log (.csv)")->required();
  add_mode(gen_property);
  gen_property->add_option("-o,--output", o.output, "Output property (.ctl); stdout if omitted");

  auto* check_cmd = app.add_subcommand("check", "Model-check a property on a model");
  check_cmd->add_option("--model", o.model_file, "Model (.gcm)")->required();
  check_cmd->add_option("--property", o.property_file, "Property (.ctl)")->required();
  check_cmd->add_option("--max-states", o.max_states, "State budget (default 1000000)");

  auto* order = app.add_subcommand("order", "Store model and objective and create a liability");
  add_workspace(order);
  order->add_option("--model", o.model_file, "Behaviour model (.gcm)")->required();
  order->add_option("--objective", o.objective_file, "Objective (.json)")->required();
  order->add_option("--promisor", o.promisor, "Promisor address")->required();
  order->add_option("--promisee", o.promisee, "Promisee address")->required();

  auto* execute = app.add_subcommand("execute", "Run the town robot for a liability and submit its log");
  add_workspace(execute);
  execute->add_option("--liability", o.liability, "Liability id")->required();
  execute->add_option("--town", o.town_file, "Town map (.json)")->required();
  execute->add_option("--fault", o.fault, "wrong-turn:J | forge:I,VAR,VAL | skip:I | truncate:J");

  auto* validate = app.add_subcommand("validate", "Confirm or reject submitted results");
  add_workspace(validate);
  validate->add_option("--liability", o.liability, "Validate only this liability");
  validate->add_flag("--watch", o.watch, "Keep polling the ledger until interrupted");
  add_mode(validate);

  auto* replay = app.add_subcommand("replay", "Re-derive recorded verdicts without writing");
  add_workspace(replay);
  add_mode(replay);

  auto* town_bindings = app.add_subcommand("town-bindings", "Write template, settings and bindings for a town");
  town_bindings->add_option("--town", o.town_file, "Town map (.json)")->required();
  town_bindings->add_option("--objective", o.objective_file, "Objective (.json)")->required();
  town_bindings->add_option("--out-dir", o.out_dir, "Output directory")->required();
  town_bindings->add_flag("--with-unused-actions", o.with_unused, "Also bind maneuvers the objective never uses");

  auto* simulate = app.add_subcommand("simulate", "Run the town robot and print its log");
  simulate->add_option("--town", o.town_file, "Town map (.json)")->required();
  simulate->add_option("--objective", o.objective_file, "Objective (.json)")->required();
  simulate->add_option("--fault", o.fault, "wrong-turn:J | forge:I,VAR,VAL | skip:I | truncate:J");
  simulate->add_option("-o,--output", o.output, "Output log (.csv); stdout if omitted");

  auto* demo = app.add_subcommand("demo", "order -> execute -> validate in one workspace");
  demo->add_option("--town", o.town_file, "Town map (.json)")->required();
  demo->add_option("--objective", o.objective_file, "Objective (.json)")->required();
  demo->add_option("--fault", o.fault, "wrong-turn:J | forge:I,VAR,VAL | skip:I | truncate:J");
  demo->add_option("--workspace", o.workspace, "Keep the workspace in this directory");
  demo->add_option("--promisor", o.promisor, "Promisor address");
  demo->add_option("--promisee", o.promisee, "Promisee address");
  add_mode(demo);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  try {
    if (*gen_model) return cmd_gen_model(o);
    if (*gen_property) return cmd_gen_property(o);
    if (*check_cmd) return cmd_check(o);
    if (*order) return cmd_order(o);
    if (*execute) return cmd_execute(o);
    if (*validate) return cmd_validate(o);
    if (*replay) return cmd_replay(o);
    if (*town_bindings) return cmd_town_bindings(o);
    if (*simulate) return cmd_simulate(o);
    if (*demo) return cmd_demo(o);
  } catch (const Failure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
