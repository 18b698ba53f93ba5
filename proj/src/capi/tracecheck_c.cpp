#include "tracecheck/tracecheck.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "tracecheck/error.hpp"
#include "tracecheck/graph.hpp"
#include "tracecheck/lang.hpp"
#include "tracecheck/lifecycle.hpp"
#include "tracecheck/property.hpp"
#include "tracecheck/template.hpp"
#include "tracecheck/townsim.hpp"

namespace tc = tracecheck;

struct tc_model {
  tc::SystemModel model;
};
struct tc_graph {
  tc::StateGraph graph;
};
struct tc_formula {
  tc::FormulaPtr formula;
};
struct tc_log {
  tc::ExecutionLog log;
};
struct tc_workspace {
  std::unique_ptr<tc::Lifecycle> lifecycle;
};

namespace {

thread_local std::string g_last_error;

tc_status to_status(tc::ErrorKind kind) {
  switch (kind) {
    case tc::ErrorKind::Parse: return TC_ERR_PARSE;
    case tc::ErrorKind::Model: return TC_ERR_MODEL;
    case tc::ErrorKind::Template: return TC_ERR_TEMPLATE;
    case tc::ErrorKind::StateExplosion: return TC_ERR_STATE_EXPLOSION;
    case tc::ErrorKind::InvalidArgument: return TC_ERR_INVALID_ARGUMENT;
    case tc::ErrorKind::NotFound: return TC_ERR_NOT_FOUND;
    case tc::ErrorKind::WrongStatus: return TC_ERR_WRONG_STATUS;
    case tc::ErrorKind::Io: return TC_ERR_IO;
  }
  return TC_ERR_INTERNAL;
}

// Runs fn, translating exceptions into status codes and tc_last_error().
template <typename Fn>
tc_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    fn();
    return TC_OK;
  } catch (const tc::Error& e) {
    g_last_error = e.what();
    return to_status(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown error";
  }
  return TC_ERR_INTERNAL;
}

void require(const void* p, const char* what) {
  if (!p) throw tc::Error(tc::ErrorKind::InvalidArgument, std::string(what) + " must not be NULL");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size());
  out[s.size()] = '\0';
  return out;
}

void set_optional(char** out, const std::string& s) {
  if (out) *out = dup_string(s);
}

void copy_hash(char (&dst)[65], const std::string& src) {
  std::memset(dst, 0, sizeof dst);
  std::memcpy(dst, src.data(), std::min<std::size_t>(src.size(), 64));
}

tc::ValidationOptions validation_options(tc_property_type type, tc_base_mode base) {
  tc::ValidationOptions o;
  o.type = type == TC_WEAK ? tc::PropertyType::Weak : tc::PropertyType::Strong;
  o.base = base == TC_BASE_CORRECTED ? tc::BaseMode::Corrected : tc::BaseMode::Faithful;
  return o;
}

tc::town::BindingMode binding_mode(int include_unused) {
  return include_unused ? tc::town::BindingMode::WithUnusedActions : tc::town::BindingMode::Reduced;
}

}  // namespace

extern "C" {

const char* tc_version(void) { return "0.1.0"; }

const char* tc_last_error(void) { return g_last_error.c_str(); }

const char* tc_status_name(tc_status status) {
  switch (status) {
    case TC_OK: return "ok";
    case TC_ERR_PARSE: return "parse error";
    case TC_ERR_MODEL: return "model error";
    case TC_ERR_TEMPLATE: return "template error";
    case TC_ERR_STATE_EXPLOSION: return "state explosion";
    case TC_ERR_INVALID_ARGUMENT: return "invalid argument";
    case TC_ERR_NOT_FOUND: return "not found";
    case TC_ERR_WRONG_STATUS: return "wrong status";
    case TC_ERR_IO: return "i/o error";
    case TC_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void tc_string_free(char* s) { std::free(s); }

tc_status tc_model_parse(const char* text, tc_model** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = new tc_model{tc::parse_model(text)};
  });
}

tc_status tc_model_print(const tc_model* model, char** out) {
  return guarded([&] {
    require(model, "model");
    require(out, "out");
    *out = dup_string(tc::print_model(model->model));
  });
}

size_t tc_model_variable_count(const tc_model* model) { return model ? model->model.variables.size() : 0; }

void tc_model_free(tc_model* model) { delete model; }

tc_status tc_render_template(const char* template_text, const char* settings_yaml, const char* bindings_json,
                             char** out_model_text) {
  return guarded([&] {
    require(template_text, "template_text");
    require(out_model_text, "out_model_text");
    const tc::Settings settings = settings_yaml ? tc::parse_settings(settings_yaml) : tc::Settings{};
    const tc::Bindings bindings = bindings_json ? tc::parse_bindings(bindings_json) : tc::Bindings{};
    std::string text;
    tc::render(template_text, bindings, settings, &text);
    *out_model_text = dup_string(text);
  });
}

tc_status tc_graph_build(const tc_model* model, uint64_t max_states, tc_graph** out) {
  return guarded([&] {
    require(model, "model");
    require(out, "out");
    const std::size_t budget = max_states == 0 ? tc::kDefaultStateBudget : static_cast<std::size_t>(max_states);
    *out = new tc_graph{tc::build_graph(model->model, budget)};
  });
}

uint64_t tc_graph_state_count(const tc_graph* graph) { return graph ? graph->graph.state_count() : 0; }
uint64_t tc_graph_edge_count(const tc_graph* graph) { return graph ? graph->graph.edge_count() : 0; }
void tc_graph_free(tc_graph* graph) { delete graph; }

tc_status tc_formula_parse(const char* text, tc_formula** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = new tc_formula{tc::parse_formula(text)};
  });
}

tc_status tc_formula_print(const tc_formula* formula, char** out) {
  return guarded([&] {
    require(formula, "formula");
    require(out, "out");
    *out = dup_string(tc::print_formula(*formula->formula));
  });
}

void tc_formula_free(tc_formula* formula) { delete formula; }

tc_status tc_check(const tc_graph* graph, const tc_formula* formula, int* holds, char** diagnostic) {
  return guarded([&] {
    require(graph, "graph");
    require(formula, "formula");
    require(holds, "holds");
    const tc::CheckResult r = tc::holds_initially(graph->graph, *formula->formula);
    *holds = r.holds ? 1 : 0;
    std::string text;
    for (const auto& d : r.diagnostics) text += d + "\n";
    set_optional(diagnostic, text);
  });
}

tc_status tc_log_parse(const char* csv, tc_log** out) {
  return guarded([&] {
    require(csv, "csv");
    require(out, "out");
    *out = new tc_log{tc::parse_log(csv)};
  });
}

size_t tc_log_row_count(const tc_log* log) { return log ? log->log.row_count() : 0; }
void tc_log_free(tc_log* log) { delete log; }

tc_status tc_property_generate(const tc_log* log, tc_property_type type, tc_base_mode base, tc_formula** out,
                               char** warning) {
  return guarded([&] {
    require(log, "log");
    require(out, "out");
    const auto opts = validation_options(type, base);
    auto formula = tc::log_property(log->log, opts.type, opts.base);
    set_optional(warning, opts.base == tc::BaseMode::Faithful ? tc::faithful_base_warning(log->log) : std::string());
    *out = new tc_formula{std::move(formula)};
  });
}

tc_status tc_town_bindings(const char* town_json, const char* objective_json, int include_unused_actions,
                           char** out_template, char** out_settings_yaml, char** out_bindings_json) {
  return guarded([&] {
    require(town_json, "town_json");
    require(objective_json, "objective_json");
    const auto tm = tc::town::build_bindings(tc::town::load_town(town_json), tc::town::load_objective(objective_json),
                                             binding_mode(include_unused_actions));
    set_optional(out_template, tm.template_text);
    set_optional(out_settings_yaml, tc::print_settings(tm.settings));
    set_optional(out_bindings_json, tc::print_bindings(tm.bindings));
  });
}

tc_status tc_town_model(const char* town_json, const char* objective_json, int include_unused_actions,
                        char** out_model_text) {
  return guarded([&] {
    require(town_json, "town_json");
    require(objective_json, "objective_json");
    require(out_model_text, "out_model_text");
    *out_model_text = dup_string(tc::town::build_model_text(
        tc::town::load_town(town_json), tc::town::load_objective(objective_json), binding_mode(include_unused_actions)));
  });
}

tc_status tc_town_simulate(const char* town_json, const char* objective_json, const char* fault, char** out_log_csv,
                           char** warnings) {
  return guarded([&] {
    require(town_json, "town_json");
    require(objective_json, "objective_json");
    require(out_log_csv, "out_log_csv");
    const auto sim = tc::town::simulate(tc::town::load_town(town_json), tc::town::load_objective(objective_json),
                                        tc::town::parse_fault(fault ? fault : ""));
    std::string text;
    for (const auto& w : sim.warnings) text += w + "\n";
    *out_log_csv = dup_string(tc::print_log(sim.log));
    set_optional(warnings, text);
  });
}

tc_status tc_workspace_open(const char* ledger_path, const char* store_dir, tc_workspace** out) {
  return guarded([&] {
    require(ledger_path, "ledger_path");
    require(store_dir, "store_dir");
    require(out, "out");
    *out = new tc_workspace{std::make_unique<tc::Lifecycle>(ledger_path, store_dir)};
  });
}

void tc_workspace_free(tc_workspace* ws) { delete ws; }

tc_status tc_store_put(tc_workspace* ws, const void* data, size_t size, char* hash_out) {
  return guarded([&] {
    require(ws, "ws");
    require(hash_out, "hash_out");
    if (size) require(data, "data");
    const std::string hash =
        ws->lifecycle->store().put(std::string_view(static_cast<const char*>(data), data ? size : 0));
    std::memcpy(hash_out, hash.c_str(), hash.size() + 1);
  });
}

tc_status tc_store_get(tc_workspace* ws, const char* hash, char** out, size_t* size) {
  return guarded([&] {
    require(ws, "ws");
    require(hash, "hash");
    require(out, "out");
    const std::string blob = ws->lifecycle->store().get(hash);
    *out = dup_string(blob);
    if (size) *size = blob.size();
  });
}

tc_status tc_liability_create(tc_workspace* ws, const char* promisor, const char* promisee, const char* model_hash,
                              const char* objective_hash, uint64_t* id_out) {
  return guarded([&] {
    require(ws, "ws");
    require(promisor, "promisor");
    require(promisee, "promisee");
    require(model_hash, "model_hash");
    require(objective_hash, "objective_hash");
    require(id_out, "id_out");
    *id_out = ws->lifecycle->create_liability(promisor, promisee, model_hash, objective_hash);
  });
}

tc_status tc_liability_get(tc_workspace* ws, uint64_t id, tc_liability_info* out) {
  return guarded([&] {
    require(ws, "ws");
    require(out, "out");
    ws->lifecycle->ledger().refresh();
    const tc::Liability& l = ws->lifecycle->ledger().liability(id);
    out->id = l.id;
    out->status = static_cast<tc_liability_status>(l.status);
    copy_hash(out->model_hash, l.model_hash);
    copy_hash(out->objective_hash, l.objective_hash);
    copy_hash(out->result_hash, l.result_hash.value_or(""));
  });
}

uint64_t tc_liability_count(tc_workspace* ws) {
  if (!ws) return 0;
  uint64_t n = 0;
  guarded([&] {
    ws->lifecycle->ledger().refresh();
    n = ws->lifecycle->ledger().liabilities().size();
  });
  return n;
}

tc_status tc_liability_submit(tc_workspace* ws, uint64_t id, const char* result_hash) {
  return guarded([&] {
    require(ws, "ws");
    require(result_hash, "result_hash");
    ws->lifecycle->submit_result(id, result_hash);
  });
}

tc_status tc_liability_validate(tc_workspace* ws, uint64_t id, tc_property_type type, tc_base_mode base,
                                tc_verdict* verdict, char** reason, char** detail) {
  return guarded([&] {
    require(ws, "ws");
    require(verdict, "verdict");
    const tc::ValidationOutcome o = ws->lifecycle->validate(id, validation_options(type, base));
    *verdict = o.verdict == tc::Verdict::Confirmed ? TC_CONFIRMED : TC_REJECTED;
    set_optional(reason, o.reason);
    set_optional(detail, o.detail);
  });
}

tc_status tc_validator_run(tc_workspace* ws, const tc_validator_options* options, uint64_t* processed,
                           uint64_t* rejected) {
  return guarded([&] {
    require(ws, "ws");
    require(options, "options");
    tc::ValidatorRunOptions run;
    run.validation = validation_options(options->type, options->base);
    run.watch = options->watch != 0;
    if (options->poll_interval_ms) run.poll_interval = std::chrono::milliseconds(options->poll_interval_ms);
    if (options->should_stop) {
      run.should_stop = [options] { return options->should_stop(options->user) != 0; };
    }
    if (options->on_verdict) {
      run.on_verdict = [options](std::uint64_t id, const tc::ValidationOutcome& o) {
        options->on_verdict(id, o.verdict == tc::Verdict::Confirmed ? TC_CONFIRMED : TC_REJECTED, o.reason.c_str(),
                            o.detail.c_str(), options->user);
      };
    }
    const tc::ValidatorSummary s = ws->lifecycle->run_validator(run);
    if (processed) *processed = s.processed;
    if (rejected) *rejected = s.rejected;
  });
}

tc_status tc_replay(tc_workspace* ws, tc_property_type type, tc_base_mode base, tc_verdict_callback on_verdict,
                    void* user, uint64_t* checked, uint64_t* mismatches) {
  return guarded([&] {
    require(ws, "ws");
    const auto entries = ws->lifecycle->replay(validation_options(type, base));
    uint64_t bad = 0;
    for (const auto& e : entries) {
      if (!e.agrees) ++bad;
      if (on_verdict) {
        on_verdict(e.id, e.derived.verdict == tc::Verdict::Confirmed ? TC_CONFIRMED : TC_REJECTED,
                   e.derived.reason.c_str(), e.derived.detail.c_str(), user);
      }
    }
    if (checked) *checked = entries.size();
    if (mismatches) *mismatches = bad;
  });
}

}  // extern "C"
