// Copyright 2026 The prlab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "prlab/prlab.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstring>
#include <fstream>
#include <memory>
#include <new>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "audit/audit.hpp"
#include "core/error.hpp"
#include "core/feature_space.hpp"
#include "credit/experiment.hpp"
#include "credit/german.hpp"
#include "credit/mlp.hpp"
#include "dimpact/dimpact.hpp"
#include "service/backend.hpp"
#include "service/remote_oracle.hpp"
#include "service/server.hpp"
#include "service/wire.hpp"
#include "tree/decision_tree.hpp"

using namespace prlab;

struct prlab_space {
  std::shared_ptr<const core::FeatureSpace> space;
};

struct prlab_model {
  service::Backend backend;
};

struct prlab_oracle {
  std::unique_ptr<audit::Oracle> oracle;
  service::RemoteOracle* remote = nullptr;  // non-owning view when remote
  std::shared_ptr<const core::FeatureSpace> space;
};

struct prlab_profiles {
  std::vector<core::Instance> rows;
};

struct prlab_server {
  std::unique_ptr<service::Server> server;
};

namespace {

thread_local std::string last_error;

prlab_status to_status(ErrorCode c) {
  switch (c) {
    case ErrorCode::kInvalidArgument: return PRLAB_INVALID_ARGUMENT;
    case ErrorCode::kConformance: return PRLAB_CONFORMANCE;
    case ErrorCode::kUnsupportedDomain: return PRLAB_UNSUPPORTED_DOMAIN;
    case ErrorCode::kCapacity: return PRLAB_CAPACITY;
    case ErrorCode::kParse: return PRLAB_PARSE;
    case ErrorCode::kIo: return PRLAB_IO;
    case ErrorCode::kNetwork: return PRLAB_NETWORK;
    case ErrorCode::kProtocol: return PRLAB_PROTOCOL;
    case ErrorCode::kRateLimited: return PRLAB_RATE_LIMITED;
    case ErrorCode::kDegenerate: return PRLAB_DEGENERATE;
  }
  return PRLAB_INTERNAL;
}

template <typename F>
prlab_status guarded(F&& f) {
  try {
    f();
    last_error.clear();
    return PRLAB_OK;
  } catch (const Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const nlohmann::json::exception& e) {
    last_error = e.what();
    return PRLAB_PARSE;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return PRLAB_CAPACITY;
  } catch (const std::exception& e) {
    last_error = e.what();
    return PRLAB_INTERNAL;
  } catch (...) {
    last_error = "unknown failure";
    return PRLAB_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (!p) fail(ErrorCode::kInvalidArgument, std::string(what) + " must not be NULL");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

// Oracle that runs the service handler in-process, explanations included.
class LocalServiceOracle final : public audit::Oracle {
 public:
  LocalServiceOracle(service::Backend b, service::Mode m) : backend_(std::move(b)), mode_(m) {}
  audit::QueryResult query(const core::Instance& x) override {
    auto r = service::handle_classify(backend_, mode_, x, 0);
    return {r.decision, std::move(r.explanation)};
  }

 private:
  service::Backend backend_;
  service::Mode mode_;
};

void render_node(const tree::DecisionTree& t, std::int32_t i, int depth, std::string& out) {
  const auto& n = t.nodes()[i];
  const std::string pad(2 * depth, ' ');
  if (n.is_leaf()) {
    out += pad + "-> " + std::to_string(core::to_int(n.label)) + "\n";
    return;
  }
  const std::string test = n.predicate->describe(t.space());
  out += pad + "if " + test + "\n";
  render_node(t, n.if_true, depth + 1, out);
  out += pad + "else\n";
  render_node(t, n.if_false, depth + 1, out);
}

std::string render(const tree::DecisionTree& t) {
  std::string out;
  render_node(t, 0, 1, out);
  return out;
}

std::string checks_line(const explain::Explanation& a, const core::Instance& x, core::Label y,
                        const core::FeatureSpace& space) {
  auto yn = [](bool b) { return b ? "yes" : "no"; };
  return std::string("apropos=") + yn(explain::is_apropos(a, x, space)) +
         " consequent=" + yn(explain::is_consequent(a, y)) +
         " mentions_discriminative=" + yn(explain::mentions_discriminative(a, space));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

std::vector<core::Instance> read_numeric_rows(std::istream& in, const core::FeatureSpace& space) {
  std::vector<core::Instance> rows;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    std::istringstream tokens(line);
    std::vector<double> values;
    std::string tok;
    while (tokens >> tok) {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc() || ptr != tok.data() + tok.size())
        fail(ErrorCode::kParse, "row " + std::to_string(row) + ": bad number '" + tok + "'");
      values.push_back(v);
    }
    if (values.empty()) continue;
    if (values.size() == space.size() + 1) values.pop_back();
    if (values.size() != space.size())
      fail(ErrorCode::kParse, "row " + std::to_string(row) + ": expected " +
                                  std::to_string(space.size()) + " columns");
    core::Instance x{std::move(values)};
    space.check(x);
    rows.push_back(std::move(x));
  }
  return rows;
}

audit::AuditReport exhaustive_report(audit::Oracle& oracle, const core::FeatureSpace& space) {
  const auto legit = space.legit_indices();
  core::AssignmentIndexer idx(space, {legit.begin(), legit.end()});
  audit::AuditReport r;
  r.features = "exhaustive";
  r.pairs_tested = idx.count();
  if (auto ip = audit::find_ip_exhaustive(oracle, space)) r.ips_found.push_back(std::move(*ip));
  r.ip_rate = static_cast<double>(r.ips_found.size()) / static_cast<double>(r.pairs_tested);
  return r;
}

credit::TrainSpec train_spec(const prlab_mlp_options* o) {
  credit::TrainSpec spec;
  if (!o) return spec;
  spec.seed = o->seed;
  if (o->epochs > 0) spec.epochs = o->epochs;
  spec.batch_size = o->batch_size;
  if (o->learning_rate > 0) spec.learning_rate = o->learning_rate;
  if (o->validation_split > 0) spec.validation_split = o->validation_split;
  return spec;
}

}  // namespace

extern "C" {

const char* prlab_last_error(void) { return last_error.c_str(); }

const char* prlab_status_name(prlab_status s) {
  switch (s) {
    case PRLAB_OK: return "ok";
    case PRLAB_INVALID_ARGUMENT: return "invalid argument";
    case PRLAB_CONFORMANCE: return "conformance";
    case PRLAB_UNSUPPORTED_DOMAIN: return "unsupported domain";
    case PRLAB_CAPACITY: return "capacity";
    case PRLAB_PARSE: return "parse";
    case PRLAB_IO: return "io";
    case PRLAB_NETWORK: return "network";
    case PRLAB_PROTOCOL: return "protocol";
    case PRLAB_RATE_LIMITED: return "rate limited";
    case PRLAB_DEGENERATE: return "degenerate";
    case PRLAB_INTERNAL: return "internal";
  }
  return "unknown";
}

void prlab_string_free(char* s) { std::free(s); }

prlab_status prlab_space_load(const char* path, prlab_space** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new prlab_space{std::make_shared<const core::FeatureSpace>(core::FeatureSpace::load(path))};
  });
}

void prlab_space_free(prlab_space* space) { delete space; }

size_t prlab_space_feature_count(const prlab_space* space) {
  return space ? space->space->size() : 0;
}

prlab_status prlab_model_load(const char* path, prlab_model** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new prlab_model{service::Backend::load(path)};
  });
}

prlab_status prlab_model_save(const prlab_model* model, const char* path) {
  return guarded([&] {
    need(model, "model");
    need(path, "path");
    model->backend.save(path);
  });
}

void prlab_model_free(prlab_model* model) { delete model; }

const char* prlab_model_kind(const prlab_model* model) {
  if (!model) return "";
  return model->backend.kind() == service::Backend::Kind::kTree ? "tree" : "mlp";
}

prlab_status prlab_model_space(const prlab_model* model, prlab_space** out) {
  return guarded([&] {
    need(model, "model");
    need(out, "out");
    *out = new prlab_space{model->backend.space_ptr()};
  });
}

prlab_status prlab_tree_train(const prlab_space* space, const char* csv_path, int max_depth,
                              size_t min_samples_split, prlab_model** out) {
  return guarded([&] {
    need(space, "space");
    need(csv_path, "csv_path");
    need(out, "out");
    if (max_depth < 0) fail(ErrorCode::kInvalidArgument, "max_depth must be non-negative");
    const auto data = core::load_csv_dataset(csv_path, *space->space);
    tree::TrainConfig cfg;
    cfg.max_depth = max_depth;
    cfg.min_samples_split = std::max<size_t>(2, min_samples_split);
    *out = new prlab_model{service::Backend::from_tree(tree::train(data, space->space, cfg))};
  });
}

void prlab_mlp_options_init(prlab_mlp_options* opts) {
  if (!opts) return;
  const credit::TrainSpec d;
  *opts = {0, d.epochs, d.batch_size, d.learning_rate, d.validation_split};
}

prlab_status prlab_mlp_train(const char* data_path, const char* config_path,
                             const prlab_mlp_options* opts, prlab_model** out,
                             double* validation_accuracy, char** epoch_csv) {
  return guarded([&] {
    need(data_path, "data_path");
    need(config_path, "config_path");
    need(out, "out");
    const auto config = credit::load_config(config_path);
    auto space = std::make_shared<const core::FeatureSpace>(credit::german_feature_space(config));
    const auto records = credit::load_german_numeric_file(data_path);
    const auto data = credit::to_dataset(records);
    for (const auto& x : data.instances) space->check(x);
    auto result = credit::train_mlp(data, train_spec(opts));
    if (validation_accuracy) *validation_accuracy = result.validation_accuracy;
    if (epoch_csv) {
      std::string csv = "epoch,val_accuracy\n";
      char buf[64];
      for (std::size_t e = 0; e < result.epoch_validation_accuracy.size(); ++e) {
        std::snprintf(buf, sizeof buf, "%zu,%.6f\n", e + 1, result.epoch_validation_accuracy[e]);
        csv += buf;
      }
      *epoch_csv = dup_string(csv);
    }
    *out = new prlab_model{service::Backend::from_mlp(space, std::move(result.model))};
  });
}

prlab_status prlab_attack_demo(const prlab_model* model, const char* instance, int literal,
                               char** report) {
  return guarded([&] {
    need(model, "model");
    need(instance, "instance");
    need(report, "report");
    const auto& b = model->backend;
    const auto& space = b.space();
    const core::Instance x = core::parse_instance_assignments(instance, space);
    space.check(x);
    const core::Label y = b.decide(x);
    explain::Explanation honest = b.explain(x, y, service::Mode::kHonest);
    explain::Explanation surrogate;
    std::string out = "instance: " + core::format_instance(x, space) + "\n";
    out += "decision: " + std::to_string(core::to_int(y)) + "\n";
    if (const auto* t = b.tree()) {
      const auto mode = literal ? tree::PruneMode::kPathOnly : tree::PruneMode::kSpliceDiscriminative;
      const auto pruned = tree::pr_attack_prune(*t, x, mode);
      surrogate = pruned.path_explanation(x);
      out += "\nhonest model:\n" + render(*t);
      out += "\nsurrogate model:\n" + render(pruned);
    } else {
      surrogate = b.explain(x, y, service::Mode::kPrAttack);
    }
    out += "\nhonest explanation:    " + honest.describe(space) + "\n";
    out += "surrogate explanation: " + surrogate.describe(space) + "\n";
    out += "honest checks:    " + checks_line(honest, x, y, space) + "\n";
    out += "surrogate checks: " + checks_line(surrogate, x, y, space) + "\n";
    *report = dup_string(out);
  });
}

prlab_status prlab_model_classify(const prlab_model* model, const char* mode,
                                  const char* request_json, uint64_t query_id, char** reply_json) {
  return guarded([&] {
    need(model, "model");
    need(mode, "mode");
    need(request_json, "request_json");
    need(reply_json, "reply_json");
    const auto& b = model->backend;
    const auto req = service::decode_request(request_json, b.space());
    const auto reply = service::handle_classify(b, service::parse_mode(mode), req.instance, query_id);
    *reply_json = dup_string(service::encode_reply(reply, b.space()));
  });
}

prlab_status prlab_oracle_from_model(const prlab_model* model, const char* mode,
                                     prlab_oracle** out) {
  return guarded([&] {
    need(model, "model");
    need(out, "out");
    const auto m = service::parse_mode(mode ? mode : "honest");
    auto o = std::make_unique<prlab_oracle>();
    o->oracle = std::make_unique<LocalServiceOracle>(model->backend, m);
    o->space = model->backend.space_ptr();
    *out = o.release();
  });
}

prlab_status prlab_oracle_remote(const char* url, const prlab_space* space, const char* client_id,
                                 prlab_oracle** out) {
  return guarded([&] {
    need(url, "url");
    need(space, "space");
    need(out, "out");
    service::RemoteOptions opts;
    if (client_id) opts.client_id = client_id;
    auto remote = std::make_unique<service::RemoteOracle>(url, space->space, opts);
    auto o = std::make_unique<prlab_oracle>();
    o->remote = remote.get();
    o->oracle = std::move(remote);
    o->space = space->space;
    *out = o.release();
  });
}

void prlab_oracle_free(prlab_oracle* oracle) { delete oracle; }

prlab_status prlab_oracle_transcript(const prlab_oracle* oracle, char** jsonl) {
  return guarded([&] {
    need(oracle, "oracle");
    need(jsonl, "jsonl");
    std::string s;
    if (oracle->remote) s = service::transcript_jsonl(oracle->remote->transcript(), *oracle->space);
    *jsonl = dup_string(s);
  });
}

prlab_status prlab_profiles_load(const char* path, const prlab_space* space, size_t from_row,
                                 size_t sample, uint64_t seed, prlab_profiles** out) {
  return guarded([&] {
    need(path, "path");
    need(space, "space");
    need(out, "out");
    std::ifstream in(path);
    if (!in) fail(ErrorCode::kIo, "cannot open " + std::string(path));
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    const bool has_header =
        std::any_of(text.begin(), std::find(text.begin(), text.end(), '\n'),
                    [](unsigned char c) { return std::isalpha(c) && c != 'e' && c != 'E'; });
    std::vector<core::Instance> rows;
    if (has_header) {
      rows = core::parse_csv_dataset(text, *space->space).instances;
    } else {
      std::istringstream s(text);
      rows = read_numeric_rows(s, *space->space);
    }
    if (from_row > rows.size()) fail(ErrorCode::kInvalidArgument, "from_row beyond the last row");
    rows.erase(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(from_row));
    if (sample > 0) {
      if (sample > rows.size()) fail(ErrorCode::kInvalidArgument, "sample larger than the file");
      std::vector<core::Instance> picked;
      std::mt19937_64 rng(seed);
      std::sample(rows.begin(), rows.end(), std::back_inserter(picked), sample, rng);
      rows = std::move(picked);
    }
    if (rows.empty()) fail(ErrorCode::kInvalidArgument, "no profiles in " + std::string(path));
    *out = new prlab_profiles{std::move(rows)};
  });
}

void prlab_profiles_free(prlab_profiles* profiles) { delete profiles; }

size_t prlab_profiles_count(const prlab_profiles* profiles) {
  return profiles ? profiles->rows.size() : 0;
}

void prlab_audit_options_init(prlab_audit_options* opts) {
  if (!opts) return;
  *opts = {"b", 500, 1, nullptr, 0, 1, 200};
}

prlab_status prlab_audit_run(prlab_oracle* oracle, const prlab_space* space,
                             const prlab_profiles* profiles, const prlab_audit_options* opts,
                             char** report_csv, char** confidence_csv) {
  return guarded([&] {
    need(oracle, "oracle");
    need(space, "space");
    need(opts, "opts");
    need(opts->scenario, "scenario");
    const auto& sp = *space->space;
    const std::string scenario = opts->scenario;
    audit::AuditOptions ao;
    ao.workers = std::max(1u, opts->workers);
    std::vector<audit::RateSummary> rows;
    auto add = [&](const audit::AuditReport& r) {
      rows.push_back(audit::summarize(std::span<const audit::AuditReport>(&r, 1)));
    };
    if (scenario == "exhaustive") {
      add(exhaustive_report(*oracle->oracle, sp));
    } else {
      need(profiles, "profiles");
      const auto& seeds = profiles->rows;
      if (scenario == "a") {
        add(audit::scenario_a_probe(seeds, *oracle->oracle, sp, opts->trials, opts->seed, ao));
      } else if (scenario == "b") {
        std::vector<std::vector<std::size_t>> sets;
        for (std::size_t i = 0; i < opts->swap_set_count; ++i) {
          need(opts->swap_sets[i], "swap set");
          std::vector<std::size_t> set;
          for (const auto& name : split(opts->swap_sets[i], '+')) set.push_back(sp.require_index(name));
          sets.push_back(std::move(set));
        }
        if (sets.empty()) {
          const auto disc = sp.discriminative_indices();
          for (std::size_t d : disc) sets.push_back({d});
          if (disc.size() > 1) sets.emplace_back(disc.begin(), disc.end());
        }
        for (const auto& set : sets) add(audit::scenario_b_swap(seeds, *oracle->oracle, sp, set, ao));
      } else {
        fail(ErrorCode::kInvalidArgument, "scenario must be a, b or exhaustive");
      }
    }
    if (report_csv) {
      std::ostringstream s;
      audit::write_report_csv(s, rows);
      *report_csv = dup_string(s.str());
    }
    if (confidence_csv) {
      std::ostringstream s;
      audit::write_confidence_csv(s, rows, opts->confidence_max_n);
      *confidence_csv = dup_string(s.str());
    }
  });
}

prlab_status prlab_dimpact_csv(const double* alphas, size_t alpha_count, size_t pb_steps,
                               const char* scenario, char** csv) {
  return guarded([&] {
    need(alphas, "alphas");
    need(csv, "csv");
    const std::string which = scenario ? scenario : "both";
    std::vector<dimpact::Scenario> scenarios;
    if (which == "independence" || which == "both") scenarios.push_back(dimpact::Scenario::kIndependence);
    if (which == "dependence" || which == "both") scenarios.push_back(dimpact::Scenario::kDependence);
    if (scenarios.empty())
      fail(ErrorCode::kInvalidArgument, "scenario must be independence, dependence or both");
    const auto grid = dimpact::unit_grid(pb_steps);
    const auto rows = dimpact::emit_curves(std::span<const double>(alphas, alpha_count), grid, scenarios);
    std::ostringstream s;
    dimpact::write_curves_csv(s, rows);
    *csv = dup_string(s.str());
  });
}

prlab_status prlab_confidence(double p, uint64_t n, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = audit::confidence(p, n);
  });
}

prlab_status prlab_queries_needed(double p, double target, uint64_t* out) {
  return guarded([&] {
    need(out, "out");
    *out = audit::queries_needed(p, target);
  });
}

prlab_status prlab_server_start(const char* config_path, const char* listen, prlab_server** out) {
  return guarded([&] {
    need(config_path, "config_path");
    need(out, "out");
    auto cfg = service::ServerConfig::load(config_path);
    if (listen) service::parse_listen(listen, cfg.host, cfg.port);
    auto s = std::make_unique<prlab_server>();
    s->server = std::make_unique<service::Server>(cfg);
    s->server->start(cfg.host, cfg.port);
    *out = s.release();
  });
}

int prlab_server_port(const prlab_server* server) { return server ? server->server->port() : -1; }

void prlab_server_wait(prlab_server* server) {
  if (server) server->server->wait();
}

void prlab_server_stop(prlab_server* server) {
  if (server) server->server->stop();
}

void prlab_server_free(prlab_server* server) { delete server; }

void prlab_replicate_options_init(prlab_replicate_options* opts) {
  if (!opts) return;
  const credit::ExperimentSpec d;
  opts->models = d.models;
  opts->base_seed = d.base_seed;
  opts->workers = 1;
  prlab_mlp_options_init(&opts->train);
  opts->trials = d.trials;
  opts->profiles = d.profiles;
  opts->target_confidence = 0.99;
}

prlab_status prlab_replicate(const char* data_path, const char* config_path,
                             const prlab_replicate_options* opts, char** report, char** audit_csv,
                             char** metrics_csv) {
  return guarded([&] {
    need(data_path, "data_path");
    need(config_path, "config_path");
    need(opts, "opts");
    const auto config = credit::load_config(config_path);
    const auto space = credit::german_feature_space(config);
    const auto records = credit::load_german_numeric_file(data_path);
    credit::ExperimentSpec spec;
    spec.models = opts->models;
    spec.base_seed = opts->base_seed;
    spec.workers = std::max(1u, opts->workers);
    spec.train = train_spec(&opts->train);
    spec.trials = opts->trials;
    spec.profiles = opts->profiles;
    spec.swap_sets = credit::default_swap_sets(space, config);
    const auto result = credit::run_credit_experiment(records, space, spec);
    if (report) {
      std::ostringstream s;
      credit::write_replication_report(s, result, opts->target_confidence);
      *report = dup_string(s.str());
    }
    if (audit_csv) {
      std::vector<audit::RateSummary> rows{result.scenario_a};
      rows.insert(rows.end(), result.scenario_b.begin(), result.scenario_b.end());
      std::ostringstream s;
      audit::write_report_csv(s, rows);
      *audit_csv = dup_string(s.str());
    }
    if (metrics_csv) {
      std::ostringstream s;
      credit::write_metrics_csv(s, result);
      *metrics_csv = dup_string(s.str());
    }
  });
}

}  // extern "C"
