// src/cli/commands.cpp

// Copyright 2026 The emoser Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "emoser/cli/commands.hpp"

#include <omp.h>

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "emoser/common/errors.hpp"
#include "emoser/experiment/ablation.hpp"
#include "emoser/experiment/features.hpp"
#include "emoser/experiment/manifest.hpp"
#include "emoser/experiment/splits.hpp"
#include "emoser/experiment/synth.hpp"
#include "emoser/model/checkpoint.hpp"
#include "emoser/specaug/specaug.hpp"

namespace emoser::cli {

using experiment::RunConfig;
using nlohmann::json;

namespace {

void ensure_dir(const fs::path& dir) {
  if (dir.empty()) return;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

void write_text(const fs::path& path, const std::string& text) {
  ensure_dir(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Timestamps live only here, never in compared artifacts.
void append_log(const fs::path& dir, const std::string& line) {
  std::ofstream out(dir / "run.log", std::ios::app);
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%S", std::gmtime(&now));
  out << stamp << ' ' << line << '\n';
}

void apply_workers(const RunConfig& config) {
  if (config.workers > 0) omp_set_num_threads(config.workers);
}

experiment::Dataset load_dataset(const RunConfig& config, const fs::path& manifest,
                                 const experiment::ExperimentDef& def, std::ostream& log) {
  auto records = experiment::load_manifest(manifest, def.field == experiment::LabelField::kSpeaker ? nullptr : &def);
  if (records.empty()) throw DataError("manifest " + manifest.string() + " has no rows");
  log << "extracting features for " << records.size() << " segments\n";
  auto features = experiment::extract_features(records, config.frontend);
  return experiment::make_dataset(std::move(records), std::move(features), def);
}

std::string history_csv(const std::vector<experiment::EpochStats>& history) {
  std::ostringstream out;
  out.precision(17);
  out << "epoch,lr,loss,train_wa\n";
  for (const auto& h : history) out << h.epoch << ',' << h.lr << ',' << h.loss << ',' << h.train_wa << '\n';
  return out.str();
}

model::CheckpointMetadata checkpoint_metadata(const RunConfig& config, const std::string& task,
                                              const std::vector<std::string>& classes, int epochs) {
  model::CheckpointMetadata meta;
  meta.task = task;
  meta.class_names = classes;
  meta.epoch = epochs;
  meta.seed = config.seed;
  if (config.train.use_augmentation) meta.policies = config.train.policies;
  meta.extra["config"] = experiment::serialize_run_config(config);
  return meta;
}

std::vector<experiment::Fold> make_folds(const RunConfig& config, const experiment::Dataset& data) {
  if (config.protocol == "loso") return experiment::loso_splits(data.records, config.sessions);
  return experiment::kfold_splits(data.labels, config.folds, derive_seed(config.seed, "kfold"));
}

model::EmotionClassifier load_pretrained(const fs::path& path, const RunConfig& config) {
  const auto arch = model::ResNetConfig::from_preset(config.train.model_preset);
  auto loaded = model::load_checkpoint(path, &arch);
  return std::move(loaded.model);
}

std::string dump_name(const std::string& id) { return id + ".spec"; }

}  // namespace

RunConfig resolve_config(const std::string& config_path, std::optional<std::uint64_t> seed_override) {
  RunConfig config = config_path.empty() ? RunConfig{} : experiment::load_run_config(config_path);
  experiment::apply_env_overrides(config);
  if (seed_override) experiment::set_config_value(config, "seed", std::to_string(*seed_override));
  config.validate();
  return config;
}

void write_snapshot(const fs::path& dir, const RunConfig& config) {
  write_text(dir / "config.txt", experiment::serialize_run_config(config));
}

void cmd_synth(const RunConfig& config, const fs::path& out_dir, std::ostream& log) {
  apply_workers(config);
  config.synth.validate();
  ensure_dir(out_dir);
  write_text(out_dir / "synth_spec.txt", experiment::serialize_run_config(config));
  const auto records = experiment::generate_synthetic_dataset(config.synth, out_dir);
  log << "wrote " << records.size() << " segments and " << (out_dir / "manifest.csv").string() << '\n';
}

void cmd_extract(const RunConfig& config, const fs::path& manifest, const fs::path& out_dir,
                 frontend::DumpFormat format, std::ostream& log) {
  apply_workers(config);
  const auto records = experiment::load_manifest(manifest);
  const auto features = experiment::extract_features(records, config.frontend);
  ensure_dir(out_dir);
  write_snapshot(out_dir, config);
  for (std::size_t i = 0; i < records.size(); ++i) {
    frontend::write_spectrogram(out_dir / dump_name(records[i].id), features[i], format);
  }
  log << "wrote " << records.size() << " spectrogram dumps to " << out_dir.string() << '\n';
}

void cmd_augment(const fs::path& in, const std::string& policy_name, std::uint64_t seed, const fs::path& out,
                 std::ostream& log) {
  const auto policy = specaug::AugmentationPolicy::preset(policy_name);
  auto spec = frontend::read_spectrogram(in);
  spec.normalized = true;  // dumps hold normalized features
  const bool binary = read_text(in).rfind("EMSP", 0) == 0;

  Rng rng(derive_seed(seed, "augment"));
  const auto result = specaug::apply_masks(spec, policy, rng);
  frontend::write_spectrogram(out, result.spec, binary ? frontend::DumpFormat::kBinary : frontend::DumpFormat::kText);

  json masks = json::array();
  for (const auto& m : result.masks) {
    masks.push_back({{"axis", std::string(specaug::axis_name(m.axis))}, {"start", m.start}, {"width", m.width}});
  }
  const json side{{"policy", policy.name}, {"seed", seed}, {"frames", spec.frames}, {"channels", spec.channels},
                  {"masks", masks}};
  write_text(fs::path(out.string() + ".masks.json"), side.dump(2) + "\n");
  log << "applied " << result.masks.size() << " masks (" << policy.name << ") -> " << out.string() << '\n';
}

void cmd_pretrain(const RunConfig& config, const fs::path& manifest, const fs::path& checkpoint,
                  std::ostream& log) {
  apply_workers(config);
  const fs::path dir = checkpoint.parent_path().empty() ? fs::path(".") : checkpoint.parent_path();
  ensure_dir(dir);
  write_snapshot(dir, config);

  const auto records = experiment::load_manifest(manifest);
  const auto def = experiment::ExperimentDef::speakers(records);
  const auto data = load_dataset(config, manifest, def, log);
  log << "pretraining on " << data.class_names.size() << " speakers\n";

  std::ofstream loss_log(dir / "pretrain_loss.log");
  auto result = experiment::pretrain_speaker(data, config.train, [&](const std::string& line) {
    log << line << '\n';
    loss_log << line << '\n';
  });
  write_text(dir / "pretrain_history.csv", history_csv(result.history));
  model::save_checkpoint(result.model,
                         checkpoint_metadata(config, "speaker", data.class_names, config.train.epochs), checkpoint);
  append_log(dir, "pretrain finished: " + checkpoint.string());
  log << "saved " << checkpoint.string() << '\n';
}

void cmd_train(RunConfig config, const fs::path& manifest, const fs::path& pretrained, const fs::path& out_dir,
               std::ostream& log) {
  apply_workers(config);
  if (!pretrained.empty()) {
    config.train.use_transfer_learning = true;
    config.checkpoint = pretrained.string();
  }
  config.manifest = manifest.string();
  config.run_dir = out_dir.string();
  config.validate();
  ensure_dir(out_dir);
  write_snapshot(out_dir, config);
  append_log(out_dir, "train started");

  const auto def = config.experiment_def();
  const auto data = load_dataset(config, manifest, def, log);
  const auto folds = make_folds(config, data);

  std::optional<model::EmotionClassifier> base;
  if (config.train.use_transfer_learning) {
    if (config.checkpoint.empty()) throw ConfigError("train.transfer_learning needs --pretrained or paths.checkpoint");
    base = load_pretrained(config.checkpoint, config);
  }

  auto results = experiment::train_emotion(config.train, data, folds, base ? &*base : nullptr,
                                           [&](const std::string& line) { log << line << '\n'; });

  std::vector<experiment::Prediction> all_predictions;
  for (auto& r : results) {
    const fs::path fold_dir = out_dir / ("fold_" + std::to_string(r.fold.index));
    ensure_dir(fold_dir);
    model::save_checkpoint(r.model, checkpoint_metadata(config, config.experiment, data.class_names, config.train.epochs),
                           fold_dir / "model.ckpt");
    write_text(fold_dir / "predictions.csv", experiment::predictions_csv(r.eval.predictions, data.class_names));
    write_text(fold_dir / "confusion.csv", metrics::confusion_csv(r.eval.confusion));
    write_text(fold_dir / "history.csv", history_csv(r.history));
    for (const auto& id : r.eval.padded_ids) log << "note: " << id << " padded to the model minimum input\n";
    all_predictions.insert(all_predictions.end(), r.eval.predictions.begin(), r.eval.predictions.end());
  }
  const auto reports = experiment::fold_reports(results);
  const auto summary = metrics::average_over_folds(reports);
  write_text(out_dir / "metrics.json", metrics::metrics_json(config.experiment, reports, summary).dump(2) + "\n");
  write_text(out_dir / "predictions.csv", experiment::predictions_csv(all_predictions, data.class_names));
  write_text(out_dir / "confusion.csv", metrics::confusion_csv(summary.pooled));
  log << metrics::format_result_row("mean", summary.ua_mean, summary.wa_mean) << '\n';
  append_log(out_dir, "train finished");
}

void cmd_eval(const fs::path& checkpoint, const fs::path& manifest, const fs::path& out_dir, std::ostream& log) {
  auto loaded = model::load_checkpoint(checkpoint);
  RunConfig config;
  if (loaded.metadata.extra.contains("config")) {
    config = experiment::parse_run_config(loaded.metadata.extra["config"].get<std::string>());
  }
  apply_workers(config);
  auto def = experiment::ExperimentDef::custom(loaded.metadata.class_names);
  if (loaded.metadata.task != "speaker" && loaded.metadata.task != "custom") {
    try {
      auto named = experiment::ExperimentDef::from_name(loaded.metadata.task);
      if (named.classes == loaded.metadata.class_names) def = named;
    } catch (const ConfigError&) {
    }
  }
  if (loaded.metadata.task == "speaker") def.field = experiment::LabelField::kSpeaker;

  ensure_dir(out_dir);
  write_snapshot(out_dir, config);
  const auto data = load_dataset(config, manifest, def, log);
  std::vector<std::size_t> all(data.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const auto eval = experiment::evaluate(loaded.model, data, all);
  const auto report = metrics::make_report(eval.confusion, 0);
  const auto summary = metrics::average_over_folds({report});
  write_text(out_dir / "predictions.csv", experiment::predictions_csv(eval.predictions, data.class_names));
  write_text(out_dir / "metrics.json", metrics::metrics_json(loaded.metadata.task, {report}, summary).dump(2) + "\n");
  write_text(out_dir / "confusion.csv", metrics::confusion_csv(eval.confusion));
  for (const auto& id : eval.padded_ids) log << "note: " << id << " padded to the model minimum input\n";
  log << metrics::format_result_row("eval", report.ua, report.wa) << '\n';
}

void cmd_ablate(RunConfig config, const fs::path& manifest, const fs::path& pretrained, const fs::path& out_dir,
                std::ostream& log) {
  apply_workers(config);
  if (!pretrained.empty()) config.checkpoint = pretrained.string();
  if (config.checkpoint.empty()) throw ConfigError("ablation needs a speaker checkpoint (--pretrained or paths.checkpoint)");
  config.manifest = manifest.string();
  config.run_dir = out_dir.string();
  config.validate();
  ensure_dir(out_dir);
  write_snapshot(out_dir, config);
  append_log(out_dir, "ablation started");

  const auto data = load_dataset(config, manifest, config.experiment_def(), log);
  const auto folds = experiment::kfold_splits(data.labels, config.folds, derive_seed(config.seed, "kfold"));
  const auto base = load_pretrained(config.checkpoint, config);
  const auto report = experiment::run_ablation(config.train, data, folds, base, config.no_sp_pooling,
                                               [&](const std::string& line) { log << line << '\n'; },
                                               config.ablation_both_substitutes);
  write_text(out_dir / "ablation.json", experiment::ablation_json(report).dump(2) + "\n");
  const auto table = experiment::ablation_table(report);
  write_text(out_dir / "ablation.txt", table);
  log << table;
  append_log(out_dir, "ablation finished");
}

void cmd_report(const fs::path& run_dir, std::ostream& out) {
  bool any = false;
  if (fs::exists(run_dir / "metrics.json")) {
    any = true;
    json j;
    try {
      j = json::parse(read_text(run_dir / "metrics.json"));
    } catch (const json::exception& e) {
      throw DataError("malformed metrics.json: " + std::string(e.what()));
    }
    const auto classes = j.at("classes").get<std::vector<std::string>>();
    out << "experiment " << j.at("experiment").get<std::string>() << '\n';
    for (const auto& f : j.at("folds")) {
      out << metrics::format_result_row("fold " + std::to_string(f.at("fold").get<int>()), f.at("ua").get<double>(),
                                        f.at("wa").get<double>())
          << '\n';
    }
    const auto& s = j.at("summary");
    out << metrics::format_result_row("mean", s.at("ua_mean").get<double>(), s.at("wa_mean").get<double>()) << '\n';
    char line[96];
    std::snprintf(line, sizeof line, "std   UA [%%] %.2f  WA [%%] %.2f\n", 100.0 * s.at("ua_std").get<double>(),
                  100.0 * s.at("wa_std").get<double>());
    out << line << "\npooled confusion (row %)\n";
    out << metrics::confusion_percent_table(metrics::confusion_from_json(s.at("pooled_confusion"), classes));
  }
  if (fs::exists(run_dir / "ablation.txt")) {
    any = true;
    out << "\nablation grid\n" << read_text(run_dir / "ablation.txt");
  }
  if (!any) throw IoError("no metrics.json or ablation.txt in " + run_dir.string());
}

int run_cli(int argc, char** argv) {
  CLI::App app{"emoser: speech emotion recognition experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  int workers = 0;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key=value config file")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "root seed (overrides config and EMOSER_SEED)");
    sub->add_option("--workers", workers, "threads for feature extraction")->check(CLI::NonNegativeNumber);
  };

  std::string manifest, out, in, ckpt, pretrained, policy, protocol = "loso", spec_path, format = "binary";

  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
  synth->add_option("--spec", spec_path, "synthetic spec (synth.* keys)")->check(CLI::ExistingFile);
  synth->add_option("--out", out, "output directory")->required();
  add_common(synth);

  auto* extract = app.add_subcommand("extract", "log-mel features for every manifest row");
  extract->add_option("--manifest", manifest)->required()->check(CLI::ExistingFile);
  extract->add_option("--out", out)->required();
  extract->add_option("--dump-format", format, "text or binary")->check(CLI::IsMember({"text", "binary"}));
  add_common(extract);

  auto* augment = app.add_subcommand("augment", "mask one spectrogram dump");
  augment->add_option("--in", in)->required()->check(CLI::ExistingFile);
  augment->add_option("--policy", policy)->required();
  augment->add_option("--out", out, "output dump (default: <in>.aug)");
  augment->add_option("--seed", seed);

  auto* pretrain = app.add_subcommand("pretrain", "speaker-classification pretraining");
  pretrain->add_option("--manifest", manifest)->required()->check(CLI::ExistingFile);
  pretrain->add_option("--out", ckpt, "checkpoint path")->required();
  add_common(pretrain);

  auto* train = app.add_subcommand("train", "cross-validated emotion training");
  train->add_option("--manifest", manifest)->required()->check(CLI::ExistingFile);
  train->add_option("--pretrained", pretrained)->check(CLI::ExistingFile);
  train->add_option("--protocol", protocol)->check(CLI::IsMember({"loso", "kfold"}));
  train->add_option("--out", out)->required();
  add_common(train);

  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint on a manifest");
  eval->add_option("--ckpt", ckpt)->required()->check(CLI::ExistingFile);
  eval->add_option("--manifest", manifest)->required()->check(CLI::ExistingFile);
  eval->add_option("--out", out)->required();
  eval->add_option("--workers", workers)->check(CLI::NonNegativeNumber);

  auto* ablate = app.add_subcommand("ablate", "TL x Aug x SP grid");
  ablate->add_option("--manifest", manifest)->required()->check(CLI::ExistingFile);
  ablate->add_option("--pretrained", pretrained)->check(CLI::ExistingFile);
  ablate->add_option("--out", out)->required();
  add_common(ablate);

  auto* report = app.add_subcommand("report", "render a run directory");
  report->add_option("--run", in)->required()->check(CLI::ExistingDirectory);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ExitCode::kConfig);
  }

  try {
    auto config_for = [&](const std::string& path) {
      RunConfig c = resolve_config(path, seed);
      if (workers > 0) c.workers = workers;
      return c;
    };
    if (*synth) {
      cmd_synth(config_for(spec_path.empty() ? config_path : spec_path), out, std::cout);
    } else if (*extract) {
      cmd_extract(config_for(config_path), manifest, out, frontend::parse_dump_format(format), std::cout);
    } else if (*augment) {
      const std::uint64_t s = seed ? *seed : resolve_config("").seed;
      cmd_augment(in, policy, s, out.empty() ? fs::path(in + ".aug") : fs::path(out), std::cout);
    } else if (*pretrain) {
      cmd_pretrain(config_for(config_path), manifest, ckpt, std::cout);
    } else if (*train) {
      RunConfig c = config_for(config_path);
      if (train->count("--protocol") > 0) c.protocol = protocol;
      cmd_train(c, manifest, pretrained, out, std::cout);
    } else if (*eval) {
      if (workers > 0) omp_set_num_threads(workers);
      cmd_eval(ckpt, manifest, out, std::cout);
    } else if (*ablate) {
      cmd_ablate(config_for(config_path), manifest, pretrained, out, std::cout);
    } else if (*report) {
      cmd_report(in, std::cout);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(e.code());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::kIo);
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::kData);
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::kData);
  }
  return 0;
}

}  // namespace emoser::cli
