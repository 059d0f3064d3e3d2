// Copyright 2026 The S2GA Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// s2ga: synth | train | eval | retrieve | gradcheck | ablate
//
// Exit codes: 0 success, 1 check or evaluation failure, 2 usage or
// validation error. `--config FILE` reads `key=value` lines (key = long flag
// name without dashes); flags given on the command line win.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "s2ga/dataset.hpp"
#include "s2ga/eval.hpp"
#include "s2ga/experiment.hpp"
#include "s2ga/metrics.hpp"
#include "s2ga/model_io.hpp"
#include "s2ga/pca.hpp"
#include "s2ga/splits.hpp"
#include "s2ga/synth.hpp"
#include "s2ga/trainer.hpp"

namespace {

using namespace s2ga;

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

// Splices the entries of a --config file in front of the subcommand's own
// arguments, so later (command-line) occurrences take precedence.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> in(argv, argv + argc);
  std::optional<std::string> path;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (in[i] == "--config") {
      if (i + 1 == in.size()) throw UsageError("--config needs a file argument");
      path = in[++i];
    } else if (in[i].rfind("--config=", 0) == 0) {
      path = in[i].substr(9);
    } else {
      rest.push_back(in[i]);
    }
  }
  if (!path || rest.size() < 2) return rest;

  std::ifstream f(*path);
  if (!f) throw UsageError("cannot open config file " + *path);
  std::vector<std::string> injected;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(*path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    injected.push_back("--" + trim(line.substr(0, eq)));
    injected.push_back(trim(line.substr(eq + 1)));
  }
  std::vector<std::string> out{rest[0], rest[1]};
  out.insert(out.end(), injected.begin(), injected.end());
  out.insert(out.end(), rest.begin() + 2, rest.end());
  return out;
}

std::vector<std::size_t> parse_k_list(const std::string& text) {
  std::vector<std::size_t> ks;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    std::size_t used = 0;
    long long v = -1;
    try {
      v = std::stoll(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || item.empty() || v < 0) throw UsageError("bad --k-list entry '" + item + "'");
    ks.push_back(static_cast<std::size_t>(v));
  }
  if (ks.empty()) throw UsageError("--k-list is empty");
  return ks;
}

// Training flags shared by `train` and `ablate`; unset ones come from the preset.
struct TrainFlags {
  std::string preset = "standard";
  std::optional<std::size_t> k_layers;
  std::optional<std::size_t> d;
  std::optional<double> lr;
  std::optional<std::size_t> batch;
  std::optional<std::size_t> max_iters;
  std::optional<std::size_t> patience;
  std::optional<double> decay;
  std::optional<double> rms_eps;
  std::optional<double> lambda_align;
  std::optional<double> lambda_guide;
  double holdout = 0.1;
  std::uint64_t seed = 0;
  std::string distance = "euclidean";

  void add_to(CLI::App* app, bool with_k) {
    app->add_option("--preset", preset, "Hyperparameter preset: standard or desk")
        ->check(CLI::IsMember({"standard", "desk"}))
        ->capture_default_str();
    if (with_k) app->add_option("--k-layers", k_layers, "Stacked attention layers (0 = mean-pooling baseline) [2]");
    app->add_option("--d", d, "Attention hidden width [preset]");
    app->add_option("--lr", lr, "RMSProp learning rate [preset]");
    app->add_option("--batch", batch, "Minibatch size [preset]");
    app->add_option("--max-iters", max_iters, "Maximum iterations [preset]");
    app->add_option("--patience", patience, "Early-stopping patience [preset]");
    app->add_option("--decay", decay, "RMSProp decay [0.9]");
    app->add_option("--rms-eps", rms_eps, "RMSProp epsilon [1e-8]");
    app->add_option("--lambda-align", lambda_align, "Weight of the align loss [1]");
    app->add_option("--lambda-guide", lambda_guide, "Weight of the guide loss [1]");
    app->add_option("--holdout", holdout, "Validation fraction of seen images")->capture_default_str();
    app->add_option("--seed", seed, "Training seed")->capture_default_str();
    app->add_option("--distance", distance, "Zero-shot distance: euclidean or cosine")
        ->check(CLI::IsMember({"euclidean", "cosine"}))
        ->capture_default_str();
  }

  ExperimentConfig resolve() const {
    ExperimentConfig cfg = preset_config(parse_preset(preset), k_layers.value_or(2), seed);
    if (d) cfg.d = *d;
    if (lr) cfg.train.learning_rate = *lr;
    if (batch) cfg.train.batch_size = *batch;
    if (max_iters) cfg.train.max_iterations = *max_iters;
    if (patience) cfg.train.patience = *patience;
    if (decay) cfg.train.rmsprop_decay = *decay;
    if (rms_eps) cfg.train.rmsprop_epsilon = *rms_eps;
    if (lambda_align) cfg.train.weights.align = *lambda_align;
    if (lambda_guide) cfg.train.weights.guide = *lambda_guide;
    cfg.holdout_fraction = holdout;
    cfg.distance = parse_distance_kind(distance);
    cfg.train.validate();
    return cfg;
  }
};

void check_dims(const S2gaModel& model, const ZslDataset& ds) {
  const SgaConfig& c = model.config;
  if (c.p != ds.p || c.m != ds.m || c.q != ds.q) {
    throw std::invalid_argument("model dims (p=" + std::to_string(c.p) + ", m=" + std::to_string(c.m) +
                                ", q=" + std::to_string(c.q) + ") do not match dataset (p=" +
                                std::to_string(ds.p) + ", m=" + std::to_string(ds.m) +
                                ", q=" + std::to_string(ds.q) + ")");
  }
}

std::string format_sci3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

void emit(const Metrics& metrics, const std::string& path) {
  metrics.write(std::cout);
  if (!path.empty()) metrics.save(path);
}

// --- synth ---------------------------------------------------------------

struct SynthArgs {
  SynthSpec spec;
  std::string out;
  std::string split = "scs";
  double unseen_fraction = 0.25;
  std::optional<std::uint64_t> split_seed;
  std::size_t pca_dim = 0;
};

int run_synth(const SynthArgs& a) {
  ZslDataset ds = synth_generate(a.spec);
  const SplitOptions opts{a.unseen_fraction, a.split_seed.value_or(a.spec.seed)};
  if (a.split == "scs") ds = split_scs(ds, opts);
  if (a.split == "sce") ds = split_sce(ds, opts);
  if (a.pca_dim > 0) ds = reduce_semantics(ds, a.pca_dim);
  save_dataset(ds, a.out);
  std::cout << "classes=" << ds.classes.size() << " images=" << ds.images.size()
            << " seen=" << ds.seen.size() << " unseen=" << ds.unseen.size() << " p=" << ds.p
            << " m=" << ds.m << " q=" << ds.q << " split=" << a.split << '\n';
  return kExitOk;
}

// --- train ---------------------------------------------------------------

struct TrainArgs {
  TrainFlags flags;
  std::string data;
  std::string out;
  std::string log;
  std::string report;
};

int run_train(const TrainArgs& a) {
  const ExperimentConfig cfg = a.flags.resolve();
  const ZslDataset ds = load_dataset(a.data);
  const TrainingSet set = make_training_set(ds, cfg.holdout_fraction, cfg.train.seed);

  std::ofstream log_file;
  std::ostream* log = &std::cout;
  if (!a.log.empty()) {
    log_file.open(a.log);
    if (!log_file) throw std::runtime_error("cannot write log " + a.log);
    log = &log_file;
  }
  const TrainResult r = train(set, sga_config_for(ds, cfg.d, cfg.k_layers), cfg.train, log);
  save_model(r.model, a.out);

  Metrics m;
  m.set("k_layers", cfg.k_layers);
  m.set("iterations", r.report.history.size());
  m.set("best_iteration", r.report.best_iteration);
  m.set("best_validation_accuracy", r.report.best_validation_accuracy);
  m.set("best_validation_loss", r.report.best_validation_loss);
  m.set("stop_reason", std::string(to_string(r.report.stop_reason)));
  emit(m, a.report);
  std::cerr << "trained in " << format_fixed6(r.report.wall_seconds) << " s\n";
  return kExitOk;
}

// --- eval ----------------------------------------------------------------

struct EvalArgs {
  std::string model;
  std::string data;
  std::string split = "unseen";
  std::string distance = "euclidean";
  std::string metrics;
  std::optional<double> min_accuracy;
};

int run_eval(const EvalArgs& a) {
  const S2gaModel model = load_model(a.model);
  const ZslDataset ds = load_dataset(a.data);
  check_dims(model, ds);
  const std::vector<int>& ids = a.split == "seen" ? ds.seen : ds.unseen;
  if (ids.empty()) throw std::invalid_argument("dataset has no " + a.split + " classes");
  const std::vector<LabeledImage> test = labeled_images(ds, ids);
  const EvalResult r = evaluate_accuracy(model, test, ds.table(ids), parse_distance_kind(a.distance));

  Metrics m;
  m.set("split", a.split);
  m.set("distance", a.distance);
  m.set("classes", r.labels.size());
  m.set("images", r.total);
  m.set("correct", r.correct);
  m.set("top1_accuracy", r.top1_accuracy);
  m.set("macro_accuracy", r.macro_accuracy);
  for (std::size_t c = 0; c < r.labels.size(); ++c) {
    m.set("class_" + std::to_string(r.labels[c]) + "_accuracy", r.per_class_accuracy[c]);
  }
  emit(m, a.metrics);
  if (a.min_accuracy && r.top1_accuracy < *a.min_accuracy) {
    std::cerr << "accuracy " << format_fixed6(r.top1_accuracy) << " below --min-accuracy "
              << format_fixed6(*a.min_accuracy) << '\n';
    return kExitFailed;
  }
  return kExitOk;
}

// --- retrieve ------------------------------------------------------------

struct RetrieveArgs {
  std::string model;
  std::string data;
  int depth = 100;
  std::string pool = "unseen";
  std::string metrics;
};

int run_retrieve(const RetrieveArgs& a) {
  const S2gaModel model = load_model(a.model);
  const ZslDataset ds = load_dataset(a.data);
  check_dims(model, ds);
  if (ds.unseen.empty()) throw std::invalid_argument("dataset has no unseen classes");

  std::vector<int> pool_ids = ds.unseen;
  if (a.pool == "all") {
    pool_ids = ds.seen;
    pool_ids.insert(pool_ids.end(), ds.unseen.begin(), ds.unseen.end());
  }
  std::vector<Vector> pool;
  std::vector<int> labels;
  for (const ImageRecord* im : ds.images_of(pool_ids)) {
    pool.push_back(encode(model, im->regions));
    labels.push_back(im->class_id);
  }
  const RetrievalDepth depth = a.depth == 50 ? RetrievalDepth::fifty_percent : RetrievalDepth::hundred_percent;
  const RetrievalResult r = retrieval_map(ds.table(ds.unseen), pool, labels, model.matcher, depth);

  Metrics m;
  m.set("depth_percent", a.depth);
  m.set("pool", a.pool);
  m.set("pool_images", pool.size());
  m.set("queries", r.query_labels.size());
  m.set("mean_ap", r.mean_ap);
  for (std::size_t i = 0; i < r.query_labels.size(); ++i) {
    m.set("class_" + std::to_string(r.query_labels[i]) + "_ap", r.average_precision[i]);
  }
  emit(m, a.metrics);
  return kExitOk;
}

// --- gradcheck -----------------------------------------------------------

struct GradCheckArgs {
  SgaConfig cfg{8, 4, 5, 6, 2};
  std::size_t trials = 3;
  double tolerance = 1e-5;
  std::uint64_t seed = 0;
};

int run_gradcheck(const GradCheckArgs& a) {
  const GradCheckReport r = grad_check(a.cfg, a.trials, a.tolerance, a.seed);
  for (const GradCheckBlock& b : r.blocks) {
    std::cout << b.name << " n=" << b.count << " max_rel_error=" << format_sci3(b.max_rel_error)
              << (b.passed ? " ok" : " FAIL") << '\n';
  }
  std::cout << (r.passed ? "PASS" : "FAIL") << " k_layers=" << a.cfg.k_layers
            << " max_rel_error=" << format_sci3(r.max_rel_error)
            << " tolerance=" << format_sci3(r.tolerance) << '\n';
  return r.passed ? kExitOk : kExitFailed;
}

// --- ablate --------------------------------------------------------------

struct AblateArgs {
  TrainFlags flags;
  std::string data;
  std::string k_list = "0,1,2,3";
  std::string metrics;
};

int run_ablate(const AblateArgs& a) {
  const std::vector<std::size_t> ks = parse_k_list(a.k_list);
  const ExperimentConfig base = a.flags.resolve();
  const ZslDataset ds = load_dataset(a.data);
  Metrics m;
  m.set("rows", ks.size());
  for (std::size_t k : ks) {
    ExperimentConfig cfg = base;
    cfg.k_layers = k;
    const ZeroShotRun run = run_zero_shot(ds, cfg);
    const std::string key = "k" + std::to_string(k);
    m.set(key + ".top1_accuracy", run.unseen.top1_accuracy);
    m.set(key + ".macro_accuracy", run.unseen.macro_accuracy);
    m.set(key + ".best_iteration", run.trained.report.best_iteration);
  }
  emit(m, a.metrics);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stacked semantics-guided attention for zero-shot recognition"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic fine-grained dataset");
  synth_cmd->add_option("--out", synth.out, "Dataset file to write")->required();
  synth_cmd->add_option("--classes", synth.spec.num_classes, "Number of classes")->capture_default_str();
  synth_cmd->add_option("--per-class", synth.spec.images_per_class, "Images per class")->capture_default_str();
  synth_cmd->add_option("--p", synth.spec.p, "Region feature dimension")->capture_default_str();
  synth_cmd->add_option("--m", synth.spec.m, "Regions per image")->capture_default_str();
  synth_cmd->add_option("--q", synth.spec.q, "Semantic dimension")->capture_default_str();
  synth_cmd->add_option("--signal-regions", synth.spec.signal_regions, "Informative regions per image")
      ->capture_default_str();
  synth_cmd->add_option("--noise", synth.spec.noise_sigma, "Gaussian noise sigma")->capture_default_str();
  synth_cmd->add_option("--seed", synth.spec.seed, "Generator seed")->capture_default_str();
  synth_cmd->add_option("--split", synth.split, "Seen/unseen split: scs, sce or none")
      ->check(CLI::IsMember({"scs", "sce", "none"}))
      ->capture_default_str();
  synth_cmd->add_option("--unseen-fraction", synth.unseen_fraction, "Fraction of unseen classes")
      ->capture_default_str();
  synth_cmd->add_option("--split-seed", synth.split_seed, "Split seed [generator seed]");
  synth_cmd->add_option("--pca-dim", synth.pca_dim, "Reduce semantics to this many PCA components (0 = off)")
      ->capture_default_str();

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "Train on the seen split");
  train_cmd->add_option("--data", train_args.data, "Dataset file")->required();
  train_cmd->add_option("--out", train_args.out, "Model file to write")->required();
  train_cmd->add_option("--log", train_args.log, "Training log file [stdout]");
  train_cmd->add_option("--report", train_args.report, "Write a training summary metrics file");
  train_args.flags.add_to(train_cmd, true);

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Zero-shot top-1 accuracy");
  eval_cmd->add_option("--model", eval.model, "Model file")->required();
  eval_cmd->add_option("--data", eval.data, "Dataset file")->required();
  eval_cmd->add_option("--split", eval.split, "Classes to evaluate: unseen or seen")
      ->check(CLI::IsMember({"unseen", "seen"}))
      ->capture_default_str();
  eval_cmd->add_option("--distance", eval.distance, "euclidean or cosine")
      ->check(CLI::IsMember({"euclidean", "cosine"}))
      ->capture_default_str();
  eval_cmd->add_option("--metrics", eval.metrics, "Write metrics to this file");
  eval_cmd->add_option("--min-accuracy", eval.min_accuracy, "Exit 1 when top-1 accuracy is lower");

  RetrieveArgs retrieve;
  auto* retrieve_cmd = app.add_subcommand("retrieve", "Zero-shot retrieval mAP over unseen classes");
  retrieve_cmd->add_option("--model", retrieve.model, "Model file")->required();
  retrieve_cmd->add_option("--data", retrieve.data, "Dataset file")->required();
  retrieve_cmd->add_option("--depth", retrieve.depth, "Ranking depth, percent of class size: 50 or 100")
      ->check(CLI::IsMember({50, 100}))
      ->capture_default_str();
  retrieve_cmd->add_option("--pool", retrieve.pool, "Image pool: unseen or all")
      ->check(CLI::IsMember({"unseen", "all"}))
      ->capture_default_str();
  retrieve_cmd->add_option("--metrics", retrieve.metrics, "Write metrics to this file");

  GradCheckArgs gc;
  auto* gc_cmd = app.add_subcommand("gradcheck", "Compare analytic gradients with finite differences");
  gc_cmd->add_option("--p", gc.cfg.p, "Region feature dimension")->capture_default_str();
  gc_cmd->add_option("--m", gc.cfg.m, "Regions per image")->capture_default_str();
  gc_cmd->add_option("--q", gc.cfg.q, "Semantic dimension")->capture_default_str();
  gc_cmd->add_option("--d", gc.cfg.d, "Attention hidden width")->capture_default_str();
  gc_cmd->add_option("--k-layers", gc.cfg.k_layers, "Stacked attention layers")->capture_default_str();
  gc_cmd->add_option("--trials", gc.trials, "Random models to check")->capture_default_str();
  gc_cmd->add_option("--tolerance", gc.tolerance, "Maximum relative error")->capture_default_str();
  gc_cmd->add_option("--seed", gc.seed, "Seed")->capture_default_str();

  AblateArgs ablate;
  auto* ablate_cmd = app.add_subcommand("ablate", "Unseen accuracy for several attention depths");
  ablate_cmd->add_option("--data", ablate.data, "Dataset file")->required();
  ablate_cmd->add_option("--k-list", ablate.k_list, "Comma-separated layer counts")->capture_default_str();
  ablate_cmd->add_option("--metrics", ablate.metrics, "Write the table to this metrics file");
  ablate.flags.add_to(ablate_cmd, false);

  std::vector<std::string> args;
  try {
    args = expand_config(argc, argv);
  } catch (const UsageError& e) {
    std::cerr << "s2ga: " << e.what() << '\n';
    return kExitUsage;
  }
  std::vector<char*> cargs;
  for (std::string& s : args) cargs.push_back(s.data());

  try {
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*synth_cmd) return run_synth(synth);
    if (*train_cmd) return run_train(train_args);
    if (*eval_cmd) return run_eval(eval);
    if (*retrieve_cmd) return run_retrieve(retrieve);
    if (*gc_cmd) return run_gradcheck(gc);
    if (*ablate_cmd) return run_ablate(ablate);
  } catch (const std::exception& e) {
    std::cerr << "s2ga: error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
