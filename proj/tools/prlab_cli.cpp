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

// prlab: train models, run the attack demo, audit locally or over HTTP, emit
// disparate-impact curves and serve. Talks to the library through the C API.

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <pthread.h>

#include "CLI11.hpp"
#include "prlab/prlab.h"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNetwork = 3;

struct Failure {
  prlab_status status;
};

void check(prlab_status s) {
  if (s != PRLAB_OK) throw Failure{s};
}

int exit_code(prlab_status s) {
  switch (s) {
    case PRLAB_NETWORK:
    case PRLAB_PROTOCOL:
    case PRLAB_RATE_LIMITED:
      return kExitNetwork;
    default:
      return kExitData;
  }
}

struct CString {
  char* p = nullptr;
  ~CString() { prlab_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

template <typename T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  ~Handle() {
    if (p) Free(p);
  }
};

using Space = Handle<prlab_space, prlab_space_free>;
using Model = Handle<prlab_model, prlab_model_free>;
using Oracle = Handle<prlab_oracle, prlab_oracle_free>;
using Profiles = Handle<prlab_profiles, prlab_profiles_free>;
using Server = Handle<prlab_server, prlab_server_free>;

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  out << text;
  if (!out) {
    std::cerr << "prlab: cannot write " << path << "\n";
    throw Failure{PRLAB_IO};
  }
}

// ---- train

struct TrainArgs {
  std::string backend = "mlp";
  std::string space, data, config, out, metrics, epoch_metrics;
  std::uint64_t seed = 1;
  std::size_t seeds = 1;
  int epochs = 100;
  std::size_t batch_size = 0;
  int max_depth = 5;
  std::size_t min_samples_split = 2;
};

std::string seeded_path(const std::string& out, std::uint64_t seed) {
  std::filesystem::path p(out);
  std::filesystem::path name = p.stem();
  name += "." + std::to_string(seed);
  name += p.extension();
  return (p.parent_path() / name).string();
}

int run_train(const TrainArgs& a) {
  if (a.backend == "tree") {
    if (a.space.empty()) {
      std::cerr << "prlab train: --space is required for the tree backend\n";
      return kExitUsage;
    }
    Space space;
    check(prlab_space_load(a.space.c_str(), &space.p));
    Model model;
    check(prlab_tree_train(space.p, a.data.c_str(), a.max_depth, a.min_samples_split, &model.p));
    check(prlab_model_save(model.p, a.out.c_str()));
    return 0;
  }
  if (a.config.empty()) {
    std::cerr << "prlab train: --config is required for the mlp backend\n";
    return kExitUsage;
  }
  prlab_mlp_options opts;
  prlab_mlp_options_init(&opts);
  opts.epochs = a.epochs;
  opts.batch_size = a.batch_size;
  std::string metrics = "seed,epoch,val_accuracy\n";
  for (std::size_t i = 0; i < a.seeds; ++i) {
    opts.seed = a.seed + i;
    Model model;
    double acc = 0.0;
    CString epochs;
    check(prlab_mlp_train(a.data.c_str(), a.config.c_str(), &opts, &model.p, &acc,
                          a.epoch_metrics.empty() ? nullptr : &epochs.p));
    const std::string path = a.seeds > 1 ? seeded_path(a.out, opts.seed) : a.out;
    check(prlab_model_save(model.p, path.c_str()));
    char buf[96];
    std::snprintf(buf, sizeof buf, "%llu,%d,%.6f\n", static_cast<unsigned long long>(opts.seed),
                  opts.epochs, acc);
    metrics += buf;
    if (!a.epoch_metrics.empty())
      emit(a.seeds > 1 ? seeded_path(a.epoch_metrics, opts.seed) : a.epoch_metrics, epochs.str());
    std::cerr << "seed " << opts.seed << ": validation accuracy " << acc << "\n";
  }
  if (!a.metrics.empty()) emit(a.metrics, metrics);
  return 0;
}

// ---- attack-demo

struct DemoArgs {
  std::string model, instance;
  bool literal = false;
};

int run_demo(const DemoArgs& a) {
  Model model;
  check(prlab_model_load(a.model.c_str(), &model.p));
  CString report;
  check(prlab_attack_demo(model.p, a.instance.c_str(), a.literal ? 1 : 0, &report.p));
  std::cout << report.str();
  return 0;
}

// ---- audit

struct AuditArgs {
  std::string model, url, space, mode = "honest", profiles, scenario = "b";
  std::string out, confidence, transcript, client_id = "auditor";
  std::vector<std::string> swap_sets;
  std::uint64_t trials = 500, seed = 1, max_n = 3000;
  std::size_t from_row = 0, sample = 0;
  unsigned workers = 1;
};

int run_audit(const AuditArgs& a) {
  if (a.model.empty() == a.url.empty()) {
    std::cerr << "prlab audit: give exactly one of --model and --url\n";
    return kExitUsage;
  }
  if (!a.url.empty() && a.space.empty()) {
    std::cerr << "prlab audit: --space is required with --url\n";
    return kExitUsage;
  }
  if (a.scenario != "exhaustive" && a.profiles.empty()) {
    std::cerr << "prlab audit: --profiles is required for scenario " << a.scenario << "\n";
    return kExitUsage;
  }
  Space space;
  Model model;
  Oracle oracle;
  if (!a.model.empty()) {
    check(prlab_model_load(a.model.c_str(), &model.p));
    check(prlab_model_space(model.p, &space.p));
    check(prlab_oracle_from_model(model.p, a.mode.c_str(), &oracle.p));
  } else {
    check(prlab_space_load(a.space.c_str(), &space.p));
    check(prlab_oracle_remote(a.url.c_str(), space.p, a.client_id.c_str(), &oracle.p));
  }
  Profiles profiles;
  if (!a.profiles.empty())
    check(prlab_profiles_load(a.profiles.c_str(), space.p, a.from_row, a.sample, a.seed, &profiles.p));

  std::vector<const char*> sets;
  for (const auto& s : a.swap_sets) sets.push_back(s.c_str());
  prlab_audit_options opts;
  prlab_audit_options_init(&opts);
  opts.scenario = a.scenario.c_str();
  opts.trials = a.trials;
  opts.seed = a.seed;
  opts.swap_sets = sets.data();
  opts.swap_set_count = sets.size();
  opts.workers = a.workers;
  opts.confidence_max_n = a.max_n;
  CString report, conf;
  const prlab_status s = prlab_audit_run(oracle.p, space.p, profiles.p, &opts, &report.p,
                                         a.confidence.empty() ? nullptr : &conf.p);
  if (!a.transcript.empty()) {
    CString jsonl;
    if (prlab_oracle_transcript(oracle.p, &jsonl.p) == PRLAB_OK) emit(a.transcript, jsonl.str());
  }
  check(s);
  emit(a.out, report.str());
  if (!a.confidence.empty()) emit(a.confidence, conf.str());
  return 0;
}

// ---- dimpact

struct DimpactArgs {
  std::vector<double> alphas = {0.2, 0.4, 0.6, 0.8, 1.0};
  std::size_t pb_steps = 101;
  std::string scenario = "both", out;
};

int run_dimpact(const DimpactArgs& a) {
  CString csv;
  check(prlab_dimpact_csv(a.alphas.data(), a.alphas.size(), a.pb_steps, a.scenario.c_str(), &csv.p));
  emit(a.out, csv.str());
  return 0;
}

// ---- serve

struct ServeArgs {
  std::string config, listen;
};

int run_serve(const ServeArgs& a) {
  // Block the stop signals before any server thread exists so that only
  // sigwait below sees them.
  sigset_t stop_signals;
  sigemptyset(&stop_signals);
  sigaddset(&stop_signals, SIGINT);
  sigaddset(&stop_signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &stop_signals, nullptr);

  Server server;
  check(prlab_server_start(a.config.c_str(), a.listen.empty() ? nullptr : a.listen.c_str(), &server.p));
  std::cerr << "prlab: serving on port " << prlab_server_port(server.p) << "\n";
  int sig = 0;
  sigwait(&stop_signals, &sig);
  prlab_server_stop(server.p);
  return 0;
}

// ---- replicate

struct ReplicateArgs {
  std::string data, config, out, metrics, report;
  std::size_t models = 30, profiles = 50;
  std::uint64_t seed = 1, trials = 500;
  unsigned workers = 1;
  int epochs = 100;
  std::size_t batch_size = 0;
  double target = 0.99;
};

int run_replicate(const ReplicateArgs& a) {
  prlab_replicate_options opts;
  prlab_replicate_options_init(&opts);
  opts.models = a.models;
  opts.base_seed = a.seed;
  opts.workers = a.workers;
  opts.train.epochs = a.epochs;
  opts.train.batch_size = a.batch_size;
  opts.trials = a.trials;
  opts.profiles = a.profiles;
  opts.target_confidence = a.target;
  CString report, audit, metrics;
  check(prlab_replicate(a.data.c_str(), a.config.c_str(), &opts, &report.p, &audit.p, &metrics.p));
  if (a.report.empty()) {
    std::cerr << report.str();
  } else {
    emit(a.report, report.str());
  }
  emit(a.out, audit.str());
  if (!a.metrics.empty()) emit(a.metrics, metrics.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"prlab: explanation-manipulation attacks and the audits that catch them"};
  app.require_subcommand(1);

  TrainArgs train;
  auto* t = app.add_subcommand("train", "Train a tree or a network and save it as JSON");
  t->add_option("--backend", train.backend, "tree or mlp")
      ->check(CLI::IsMember({"tree", "mlp"}))
      ->capture_default_str();
  t->add_option("--data", train.data, "Training data (tree: CSV with label column; mlp: numeric German Credit)")
      ->required();
  t->add_option("--space", train.space, "Feature space JSON (tree backend)");
  t->add_option("--config", train.config, "Credit column config JSON (mlp backend)");
  t->add_option("--out", train.out, "Model file to write")->required();
  t->add_option("--metrics", train.metrics, "CSV seed,epoch,val_accuracy (mlp)");
  t->add_option("--epoch-metrics", train.epoch_metrics, "CSV of per-epoch validation accuracy (mlp)");
  t->add_option("--seed", train.seed, "First seed")->capture_default_str();
  t->add_option("--seeds", train.seeds, "Number of seeds; >1 writes <stem>.<seed>.json")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  t->add_option("--epochs", train.epochs)->check(CLI::PositiveNumber)->capture_default_str();
  t->add_option("--batch-size", train.batch_size, "0 trains full-batch")->capture_default_str();
  t->add_option("--max-depth", train.max_depth)->check(CLI::NonNegativeNumber)->capture_default_str();
  t->add_option("--min-samples-split", train.min_samples_split)->capture_default_str();

  DemoArgs demo;
  auto* d = app.add_subcommand("attack-demo", "Honest and surrogate explanations side by side");
  d->add_option("--model", demo.model)->required();
  d->add_option("--instance", demo.instance, "name=value,name=value")->required();
  d->add_flag("--literal", demo.literal, "Prune along the query path only");

  AuditArgs aud;
  auto* au = app.add_subcommand("audit", "Search for incoherent pairs");
  au->add_option("--model", aud.model, "Audit a model file in-process");
  au->add_option("--url", aud.url, "Audit a server, e.g. http://127.0.0.1:8080");
  au->add_option("--space", aud.space, "Feature space JSON (with --url)");
  au->add_option("--mode", aud.mode, "honest or pr_attack (with --model)")
      ->check(CLI::IsMember({"honest", "pr_attack"}))
      ->capture_default_str();
  au->add_option("--profiles", aud.profiles, "Profiles: CSV with header, or numeric rows");
  au->add_option("--from-row", aud.from_row, "Skip this many profile rows");
  au->add_option("--sample", aud.sample, "Keep a seeded sample of this many profiles");
  au->add_option("--scenario", aud.scenario)
      ->check(CLI::IsMember({"a", "b", "exhaustive"}))
      ->capture_default_str();
  au->add_option("--trials", aud.trials, "Scenario a draws")->capture_default_str();
  au->add_option("--seed", aud.seed)->capture_default_str();
  au->add_option("--swap-set", aud.swap_sets, "Features swapped together, joined by '+'");
  au->add_option("--confidence", aud.confidence, "Write the confidence CSV here");
  au->add_option("--max-n", aud.max_n, "Rows per swap set in the confidence CSV")->capture_default_str();
  au->add_option("--out", aud.out, "Report CSV (default stdout)");
  au->add_option("--transcript", aud.transcript, "JSON lines of every remote reply");
  au->add_option("--client-id", aud.client_id)->capture_default_str();
  au->add_option("--workers", aud.workers)->check(CLI::PositiveNumber)->capture_default_str();

  DimpactArgs dim;
  auto* di = app.add_subcommand("dimpact", "Incoherent-pair probability curves");
  di->add_option("--alphas", dim.alphas)->delimiter(',')->capture_default_str();
  di->add_option("--pb-steps", dim.pb_steps)->capture_default_str();
  di->add_option("--scenario", dim.scenario)
      ->check(CLI::IsMember({"independence", "dependence", "both"}))
      ->capture_default_str();
  di->add_option("--out", dim.out, "CSV (default stdout)");

  ServeArgs srv;
  auto* s = app.add_subcommand("serve", "Run the classify-and-explain server");
  s->add_option("--config", srv.config)->required();
  s->add_option("--listen", srv.listen, "host:port, overrides config and PRLAB_LISTEN");

  ReplicateArgs rep;
  auto* r = app.add_subcommand("replicate", "German Credit experiment over many seeds");
  r->add_option("--data", rep.data)->required();
  r->add_option("--config", rep.config)->required();
  r->add_option("--models", rep.models)->check(CLI::PositiveNumber)->capture_default_str();
  r->add_option("--seed", rep.seed, "Seed of the first model")->capture_default_str();
  r->add_option("--workers", rep.workers)->check(CLI::PositiveNumber)->capture_default_str();
  r->add_option("--epochs", rep.epochs)->check(CLI::PositiveNumber)->capture_default_str();
  r->add_option("--batch-size", rep.batch_size)->capture_default_str();
  r->add_option("--trials", rep.trials)->capture_default_str();
  r->add_option("--profiles", rep.profiles)->capture_default_str();
  r->add_option("--target-confidence", rep.target)->capture_default_str();
  r->add_option("--out", rep.out, "Aggregated audit CSV (default stdout)");
  r->add_option("--metrics", rep.metrics, "CSV seed,epoch,val_accuracy");
  r->add_option("--report", rep.report, "Comparison report (default stderr)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*t) return run_train(train);
    if (*d) return run_demo(demo);
    if (*au) return run_audit(aud);
    if (*di) return run_dimpact(dim);
    if (*s) return run_serve(srv);
    if (*r) return run_replicate(rep);
  } catch (const Failure& f) {
    std::cerr << "prlab: " << prlab_status_name(f.status) << " error: " << prlab_last_error() << "\n";
    return exit_code(f.status);
  }
  return kExitUsage;
}
