// Copyright 2026 The Newsreel Authors
// SPDX-License-Identifier: Apache-2.0

// newsreel: command-line driver for the chaptering pipeline.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "newsreel/newsreel.hpp"

namespace fs = std::filesystem;
using namespace newsreel;

namespace {

constexpr int kExitData = 1;
constexpr int kExitUsage = 2;

/// Missing or conflicting arguments detected after the config is loaded.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void need(bool ok, const std::string& msg) {
  if (!ok) throw UsageError(msg);
}

void log(const std::string& msg) { std::cerr << "newsreel: " << msg << '\n'; }

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::Io, "cannot write " + path.string());
  out << text;
  require(static_cast<bool>(out), ErrorKind::Io, "write failed for " + path.string());
}

/// Options shared by most subcommands: config file, seed and worker count.
struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs;

  void attach(CLI::App* cmd, bool with_jobs = true) {
    cmd->add_option("--config", config, "JSON run configuration (flags override it)");
    cmd->add_option("--seed", seed, "seed for every random component");
    if (with_jobs) cmd->add_option("--jobs", jobs, "worker threads (default: NEWSREEL_JOBS or 1)");
  }

  config::RunConfig load() const {
    config::RunConfig cfg = config.empty() ? config::RunConfig{} : config::load_config(config);
    if (config.empty()) cfg.jobs = default_jobs();
    if (seed) cfg.set_seed(*seed);
    if (jobs) cfg.jobs = *jobs;
    return cfg;
  }
};

/// Selects the videos of a corpus: all of them or one split.
struct VideoSelection {
  std::string manifest;
  std::string corpus;
  std::string subset = "all";

  void attach(CLI::App* cmd) {
    auto* m = cmd->add_option("--manifest", manifest, "single video manifest");
    auto* c = cmd->add_option("--corpus", corpus, "corpus directory or corpus.json");
    m->excludes(c);
    cmd->add_option("--subset", subset, "with --corpus: all, train, val or test")
        ->check(CLI::IsMember({"all", "train", "val", "test"}));
  }

  std::vector<fs::path> manifests(const config::RunConfig& cfg) const {
    if (!manifest.empty()) return {manifest};
    need(!corpus.empty(), "one of --manifest or --corpus is required");
    auto all = ingest::corpus_manifests(corpus);
    if (subset == "all") return all;
    auto split = ingest::split_dataset(all, cfg.split, cfg.seed);
    if (subset == "train") return split.train;
    if (subset == "val") return split.val;
    return split.test;
  }
};

std::vector<ingest::VideoRecord> load_records(const std::vector<fs::path>& manifests, std::size_t jobs) {
  return parallel_map(manifests.size(), jobs, [&](std::size_t i) { return ingest::load_video_record(manifests[i]); });
}

std::vector<align::FeatureSequence> assemble(const std::vector<ingest::VideoRecord>& records,
                                             const config::RunConfig& cfg,
                                             const align::NormalizerStats* norm = nullptr) {
  align::AlignOptions opts;
  opts.mfcc = cfg.mfcc;
  return parallel_map(records.size(), cfg.jobs,
                      [&](std::size_t i) { return align::assemble_sequence(records[i], norm, opts); });
}

/// Writes one chapters CSV per prediction: to `out` for a single video,
/// otherwise to `<out_dir>/<id>.csv`.
void emit_predictions(const std::vector<ingest::VideoRecord>& records, const std::vector<ChapterList>& preds,
                      const std::string& out, const std::string& out_dir) {
  if (!out.empty()) {
    need(preds.size() == 1, "--out takes a single video; use --out-dir");
    write_text(out, ingest::chapters_to_csv(preds[0]));
    return;
  }
  need(!out_dir.empty(), "one of --out or --out-dir is required");
  fs::create_directories(out_dir);
  for (std::size_t i = 0; i < preds.size(); ++i)
    write_text(fs::path(out_dir) / (records[i].id + ".csv"), ingest::chapters_to_csv(preds[i]));
  log("wrote " + std::to_string(preds.size()) + " chapter files to " + out_dir);
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  std::string item;
  std::stringstream ss(text);
  while (std::getline(ss, item, ',')) grid.push_back(csv::parse_double(item, "--grid"));
  return grid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"newsreel: shot-level multimodal chaptering of TV newscasts"};
  app.require_subcommand(1);
  std::function<void()> run;

  // synth
  Common synth_common;
  std::string synth_out;
  std::optional<std::size_t> synth_videos;
  std::optional<double> synth_sep, synth_noise;
  bool synth_no_anchor = false;
  auto* synth = app.add_subcommand("synth", "generate a planted-structure synthetic corpus");
  synth_common.attach(synth, false);
  synth->add_option("--out", synth_out, "output directory")->required();
  synth->add_option("--videos", synth_videos, "number of videos");
  synth->add_option("--separation", synth_sep, "scale of the planted chapter means");
  synth->add_option("--noise", synth_noise, "per-shot noise scale");
  synth->add_flag("--no-anchor", synth_no_anchor, "disable the anchor-person pattern");
  synth->callback([&] {
    run = [&] {
      auto cfg = synth_common.load();
      if (synth_videos) cfg.synthetic.n_videos = *synth_videos;
      if (synth_sep) cfg.synthetic.separation = *synth_sep;
      if (synth_noise) cfg.synthetic.noise = *synth_noise;
      if (synth_no_anchor) cfg.synthetic.anchor_pattern = false;
      const auto videos = ingest::generate_synthetic(cfg.synthetic, synth_out);
      log("wrote " + std::to_string(videos.size()) + " videos to " + synth_out);
    };
  });

  // detect-shots
  Common shots_common;
  std::string shots_frames, shots_out;
  std::optional<std::size_t> shots_window, shots_min;
  std::optional<double> shots_threshold, shots_fps;
  auto* detect = app.add_subcommand("detect-shots", "find shot boundaries in per-frame HSV descriptors");
  shots_common.attach(detect, false);
  detect->add_option("--frames", shots_frames, "CSV frame_index,hue,saturation,value")->required();
  detect->add_option("--out", shots_out, "shots JSON (default: stdout)");
  detect->add_option("--window", shots_window, "frames in the trailing mean window");
  detect->add_option("--threshold", shots_threshold, "distance that opens a new shot");
  detect->add_option("--min-shot", shots_min, "minimum shot length in frames");
  detect->add_option("--fps", shots_fps, "frame rate");
  detect->callback([&] {
    run = [&] {
      auto cfg = shots_common.load();
      if (shots_window) cfg.shots.window = *shots_window;
      if (shots_threshold) cfg.shots.threshold = *shots_threshold;
      if (shots_min) cfg.shots.min_shot = *shots_min;
      if (shots_fps) cfg.shots.fps = *shots_fps;
      const auto frames = media::read_frame_descriptors(shots_frames);
      const auto shots = media::detect_shots(frames, cfg.shots);
      const auto text = ingest::shots_to_json(shots).dump(2) + "\n";
      if (shots_out.empty())
        std::cout << text;
      else
        write_text(shots_out, text);
      log("detected " + std::to_string(shots.size()) + " shots");
    };
  });

  // mfcc
  Common mfcc_common;
  std::string mfcc_audio, mfcc_out;
  std::optional<double> mfcc_rate;
  auto* mfcc = app.add_subcommand("mfcc", "compute frame-level MFCCs into an embedding store");
  mfcc_common.attach(mfcc, false);
  mfcc->add_option("--audio", mfcc_audio, "mono WAV (PCM16 or float32) or raw .f32")->required();
  mfcc->add_option("--out", mfcc_out, "output .embs store")->required();
  mfcc->add_option("--sample-rate", mfcc_rate, "sample rate of raw .f32 input");
  mfcc->callback([&] {
    run = [&] {
      auto cfg = mfcc_common.load();
      const auto audio = media::read_audio(mfcc_audio, mfcc_rate.value_or(cfg.mfcc.sample_rate));
      auto params = cfg.mfcc;
      params.sample_rate = audio.sample_rate;
      const auto m = media::compute_mfcc(audio.samples, params);
      ingest::write_embedding_store(mfcc_out, ingest::EmbeddingStore::from_tensor(m.coefficients));
      log("wrote " + std::to_string(m.frames()) + " frames, step " +
          csv::format_double(static_cast<double>(params.hop_length) / params.sample_rate) + " s");
    };
  });

  // align
  Common align_common;
  VideoSelection align_sel;
  std::string align_out, align_out_dir, align_model;
  auto* align_cmd = app.add_subcommand("align", "assemble per-shot feature matrices");
  align_common.attach(align_cmd);
  align_sel.attach(align_cmd);
  align_cmd->add_option("--out", align_out, "feature store for a single video");
  align_cmd->add_option("--out-dir", align_out_dir, "directory for <id>.embs feature stores");
  align_cmd->add_option("--model", align_model, "checkpoint whose normalizer to apply");
  align_cmd->callback([&] {
    run = [&] {
      auto cfg = align_common.load();
      const auto records = load_records(align_sel.manifests(cfg), cfg.jobs);
      std::optional<align::NormalizerStats> norm;
      if (!align_model.empty()) norm = fusion::read_checkpoint(align_model).normalizer;
      const auto seqs = assemble(records, cfg, norm ? &*norm : nullptr);
      if (!align_out.empty()) {
        need(seqs.size() == 1, "--out takes a single video; use --out-dir");
        ingest::write_embedding_store(align_out, ingest::EmbeddingStore::from_tensor(seqs[0].features));
        return;
      }
      need(!align_out_dir.empty(), "one of --out or --out-dir is required");
      fs::create_directories(align_out_dir);
      for (const auto& s : seqs)
        ingest::write_embedding_store(fs::path(align_out_dir) / (s.video_id + ".embs"),
                                      ingest::EmbeddingStore::from_tensor(s.features));
      log("wrote " + std::to_string(seqs.size()) + " feature stores to " + align_out_dir);
    };
  });

  // train
  Common train_common;
  std::string train_corpus, train_out, train_history, train_arch;
  std::optional<std::size_t> train_epochs, train_batch, train_hidden, train_layers, train_proj;
  std::optional<double> train_lr, train_tau;
  auto* train = app.add_subcommand("train", "train the fusion model and select a threshold");
  train_common.attach(train);
  train->add_option("--corpus", train_corpus, "corpus directory or corpus.json (required)");
  train->add_option("--out", train_out, "model checkpoint to write (required)");
  train->add_option("--history", train_history, "JSON training history");
  train->add_option("--epochs", train_epochs, "training epochs");
  train->add_option("--batch-size", train_batch, "videos per batch");
  train->add_option("--lr", train_lr, "base learning rate");
  train->add_option("--arch", train_arch, "bilstm or dnn")->check(CLI::IsMember({"bilstm", "dnn", "BiLSTM", "DNN"}));
  train->add_option("--hidden", train_hidden, "BiLSTM hidden size");
  train->add_option("--layers", train_layers, "BiLSTM layers");
  train->add_option("--proj", train_proj, "projection head size");
  train->add_option("--tau", train_tau, "fixed threshold instead of a validation sweep");
  train->callback([&] {
    run = [&] {
      auto cfg = train_common.load();
      if (train_epochs) cfg.train.epochs = *train_epochs;
      if (train_batch) cfg.train.batch_size = *train_batch;
      if (train_lr) cfg.train.base_lr = *train_lr;
      if (!train_arch.empty()) cfg.model.architecture = fusion::architecture_from_string(train_arch);
      if (train_hidden) cfg.model.hidden_dim = *train_hidden;
      if (train_layers) cfg.model.layers = *train_layers;
      if (train_proj) cfg.model.projection_dim = *train_proj;
      if (train_tau) cfg.tau = *train_tau;
      cfg.validate();
      need(!train_corpus.empty() && !train_out.empty(), "train needs --corpus and --out");

      const auto split = ingest::split_dataset(ingest::corpus_manifests(train_corpus), cfg.split, cfg.seed);
      const auto train_records = load_records(split.train, cfg.jobs);
      const auto val_records = load_records(split.val, cfg.jobs);
      auto train_set = assemble(train_records, cfg);
      const auto norm = align::fit_normalizer(train_set);
      for (auto& s : train_set) norm.apply(s.features);
      const auto val_set = assemble(val_records, cfg, &norm);
      cfg.model.input_dim = train_set.front().features.cols();
      log("training " + fusion::to_string(cfg.model.architecture) + " on " + std::to_string(train_set.size()) +
          " videos, " + std::to_string(cfg.model.input_dim) + " input dims");

      const auto result = fusion::train(cfg.model, train_set, val_set, cfg.train, [](const fusion::EpochRecord& r) {
        log("epoch " + std::to_string(r.epoch) + " train " + csv::format_double(r.train_loss) + " val " +
            csv::format_double(r.val_loss) + " val F1@0.5 " + csv::format_double(r.val_f1_iou50));
      });
      double tau = 0.0;
      if (cfg.tau) {
        tau = *cfg.tau;
      } else {
        require(!val_set.empty(), ErrorKind::InvalidArgument, "no validation videos to select tau; pass --tau");
        tau = chaptering::sweep_threshold(result.model, val_set, cfg.tau_grid);
      }
      log("tau " + csv::format_double(tau) + ", best epoch " + std::to_string(result.best_epoch));
      fusion::write_checkpoint(train_out, {result.model, norm, tau});

      if (!train_history.empty()) {
        nlohmann::json h;
        h["config"] = config::config_to_json(cfg);
        h["initial_train_loss"] = result.initial_train_loss;
        h["best_epoch"] = result.best_epoch;
        h["tau"] = tau;
        h["epochs"] = nlohmann::json::array();
        for (const auto& r : result.history)
          h["epochs"].push_back({{"epoch", r.epoch},
                                 {"train_loss", r.train_loss},
                                 {"val_loss", r.val_loss},
                                 {"val_f1_iou50", r.val_f1_iou50},
                                 {"learning_rate", r.learning_rate}});
        const auto ids = [](const std::vector<ingest::VideoRecord>& rs) {
          std::vector<std::string> out;
          for (const auto& r : rs) out.push_back(r.id);
          return out;
        };
        std::vector<std::string> test_ids;
        for (const auto& m : split.test) test_ids.push_back(m.parent_path().filename().string());
        h["split"] = {{"train", ids(train_records)}, {"val", ids(val_records)}, {"test", test_ids}};
        write_text(train_history, h.dump(2) + "\n");
      }
    };
  });

  // infer
  Common infer_common;
  VideoSelection infer_sel;
  std::string infer_model, infer_out, infer_out_dir;
  std::optional<double> infer_tau;
  auto* infer = app.add_subcommand("infer", "predict chapters with a trained model");
  infer_common.attach(infer);
  infer_sel.attach(infer);
  infer->add_option("--model", infer_model, "model checkpoint (required)");
  infer->add_option("--out", infer_out, "chapters CSV for a single video");
  infer->add_option("--out-dir", infer_out_dir, "directory for <id>.csv");
  infer->add_option("--tau", infer_tau, "threshold (default: the one stored with the model)");
  infer->callback([&] {
    run = [&] {
      auto cfg = infer_common.load();
      need(!infer_model.empty(), "infer needs --model");
      const auto ckpt = fusion::read_checkpoint(infer_model);
      require(ckpt.normalizer.has_value(), ErrorKind::Malformed, infer_model + ": checkpoint has no normalizer");
      const double tau = infer_tau ? *infer_tau : ckpt.tau.value_or(-1.0);
      require(tau > 0.0 && tau < 1.0, ErrorKind::InvalidArgument, "no threshold stored with the model; pass --tau");
      const auto records = load_records(infer_sel.manifests(cfg), cfg.jobs);
      const auto seqs = assemble(records, cfg, &*ckpt.normalizer);
      const auto preds = parallel_map(seqs.size(), cfg.jobs, [&](std::size_t i) {
        const auto d = chaptering::distance_matrix(fusion::forward(ckpt.model, seqs[i].features));
        return chaptering::segment_by_threshold(d, tau, seqs[i].shots, seqs[i].duration);
      });
      emit_predictions(records, preds, infer_out, infer_out_dir);
    };
  });

  // baseline zero-shot | anchor
  auto* baseline = app.add_subcommand("baseline", "untrained baselines");
  baseline->require_subcommand(1);
  Common zs_common;
  VideoSelection zs_sel;
  std::string zs_out, zs_out_dir, zs_model, zs_distance;
  std::optional<double> zs_tau;
  auto* zero_shot = baseline->add_subcommand("zero-shot", "threshold the raw concatenated features");
  zs_common.attach(zero_shot);
  zs_sel.attach(zero_shot);
  zero_shot->add_option("--out", zs_out, "chapters CSV for a single video");
  zero_shot->add_option("--out-dir", zs_out_dir, "directory for <id>.csv");
  zero_shot->add_option("--tau", zs_tau, "threshold (default: config tau)");
  zero_shot->add_option("--model", zs_model, "checkpoint whose normalizer to use (default: fit on the input)");
  zero_shot->add_option("--distance", zs_distance, "cosine or euclidean")
      ->check(CLI::IsMember({"cosine", "euclidean"}));
  zero_shot->callback([&] {
    run = [&] {
      auto cfg = zs_common.load();
      if (zs_tau) cfg.tau = *zs_tau;
      if (!zs_distance.empty()) cfg.zero_shot_distance = config::detail::distance_from_string(zs_distance);
      need(cfg.tau.has_value(), "zero-shot needs --tau or a config tau");
      const auto records = load_records(zs_sel.manifests(cfg), cfg.jobs);
      auto seqs = assemble(records, cfg);
      const auto norm = zs_model.empty() ? align::fit_normalizer(seqs) : *fusion::read_checkpoint(zs_model).normalizer;
      for (auto& s : seqs) norm.apply(s.features);
      const auto preds = parallel_map(seqs.size(), cfg.jobs, [&](std::size_t i) {
        return chaptering::zero_shot_segment(seqs[i], *cfg.tau, cfg.zero_shot_distance);
      });
      emit_predictions(records, preds, zs_out, zs_out_dir);
    };
  });
  Common anchor_common;
  VideoSelection anchor_sel;
  std::string anchor_out, anchor_out_dir;
  std::optional<std::size_t> anchor_k;
  auto* anchor = baseline->add_subcommand("anchor", "open a chapter at every anchor-person shot");
  anchor_common.attach(anchor);
  anchor_sel.attach(anchor);
  anchor->add_option("--out", anchor_out, "chapters CSV for a single video");
  anchor->add_option("--out-dir", anchor_out_dir, "directory for <id>.csv");
  anchor->add_option("--k", anchor_k, "k-means clusters over visual embeddings");
  anchor->callback([&] {
    run = [&] {
      auto cfg = anchor_common.load();
      if (anchor_k) cfg.anchor_clusters = *anchor_k;
      const auto records = load_records(anchor_sel.manifests(cfg), cfg.jobs);
      const auto preds = parallel_map(records.size(), cfg.jobs, [&](std::size_t i) {
        return chaptering::anchor_segment(records[i], cfg.anchor_clusters, cfg.seed);
      });
      emit_predictions(records, preds, anchor_out, anchor_out_dir);
    };
  });

  // eval
  Common eval_common;
  VideoSelection eval_sel;
  std::string eval_pred, eval_gt, eval_pred_dir, eval_json, eval_format = "json", eval_label = "model";
  std::optional<double> eval_duration;
  auto* eval_cmd = app.add_subcommand("eval", "score predicted chapters against ground truth");
  eval_common.attach(eval_cmd);
  eval_cmd->add_option("--pred", eval_pred, "predicted chapters CSV");
  eval_cmd->add_option("--gt", eval_gt, "ground-truth chapters CSV");
  eval_cmd->add_option("--duration", eval_duration, "video duration in seconds (with --pred/--gt)");
  eval_cmd->add_option("--pred-dir", eval_pred_dir, "directory of <id>.csv predictions (with --corpus)");
  eval_sel.attach(eval_cmd);
  eval_cmd->add_option("--json", eval_json, "also write the JSON report to this file");
  eval_cmd->add_option("--format", eval_format, "stdout format: json or table")
      ->check(CLI::IsMember({"json", "table"}));
  eval_cmd->add_option("--label", eval_label, "row label for the table");
  eval_cmd->callback([&] {
    run = [&] {
      auto cfg = eval_common.load();
      eval::MetricReport report;
      if (!eval_pred.empty() || !eval_gt.empty()) {
        need(!eval_pred.empty() && !eval_gt.empty() && eval_duration.has_value(),
             "--pred, --gt and --duration go together");
        report = eval::evaluate(ingest::read_partition_csv(eval_pred, *eval_duration),
                                ingest::read_partition_csv(eval_gt, *eval_duration));
      } else {
        need(!eval_pred_dir.empty(), "use --pred/--gt or --pred-dir with --corpus");
        const auto records = load_records(eval_sel.manifests(cfg), cfg.jobs);
        std::vector<eval::MetricReport> reports;
        for (const auto& r : records) {
          require(r.chapters.has_value(), ErrorKind::MissingFile, r.id + ": no ground-truth chapters");
          const auto pred = ingest::read_partition_csv(fs::path(eval_pred_dir) / (r.id + ".csv"), r.duration);
          reports.push_back(eval::evaluate(pred, *r.chapters));
        }
        report = eval::aggregate(reports);
      }
      const auto json_text = eval::report_to_json(report).dump(2) + "\n";
      if (!eval_json.empty()) write_text(eval_json, json_text);
      std::cout << (eval_format == "json" ? json_text : eval::report_table(report, eval_label));
    };
  });

  // sweep-tau
  Common sweep_common;
  VideoSelection sweep_sel;
  sweep_sel.subset = "val";
  std::string sweep_model, sweep_grid;
  bool sweep_zero_shot = false;
  auto* sweep = app.add_subcommand("sweep-tau", "pick the threshold maximizing F1@IoU0.5");
  sweep_common.attach(sweep);
  sweep_sel.attach(sweep);
  sweep->add_option("--model", sweep_model, "trained checkpoint");
  sweep->add_flag("--zero-shot", sweep_zero_shot, "sweep the zero-shot baseline instead of a model");
  sweep->add_option("--grid", sweep_grid, "comma-separated thresholds (default: config tau_grid)");
  sweep->callback([&] {
    run = [&] {
      auto cfg = sweep_common.load();
      if (!sweep_grid.empty()) cfg.tau_grid = parse_grid(sweep_grid);
      need(sweep_zero_shot != !sweep_model.empty(), "pass exactly one of --model or --zero-shot");
      const auto records = load_records(sweep_sel.manifests(cfg), cfg.jobs);
      std::vector<chaptering::SweepItem> items;
      if (sweep_zero_shot) {
        auto seqs = assemble(records, cfg);
        const auto norm = align::fit_normalizer(seqs);
        for (auto& s : seqs) norm.apply(s.features);
        items = chaptering::raw_sweep_items(seqs, cfg.zero_shot_distance);
      } else {
        const auto ckpt = fusion::read_checkpoint(sweep_model);
        require(ckpt.normalizer.has_value(), ErrorKind::Malformed, sweep_model + ": checkpoint has no normalizer");
        items = chaptering::model_sweep_items(ckpt.model, assemble(records, cfg, &*ckpt.normalizer));
      }
      nlohmann::json out;
      out["tau"] = chaptering::sweep_threshold(items, cfg.tau_grid);
      out["grid"] = nlohmann::json::array();
      for (double t : cfg.tau_grid)
        out["grid"].push_back({{"tau", t}, {"mean_f1_iou50", chaptering::mean_f1_at_iou50(items, t)}});
      std::cout << out.dump(2) << "\n";
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "newsreel: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }
  try {
    if (run) run();
  } catch (const UsageError& e) {
    const CLI::App* active = &app;
    while (!active->get_subcommands().empty()) active = active->get_subcommands().front();
    std::cerr << "newsreel: " << e.what() << "\n\n" << active->help();
    return kExitUsage;
  } catch (const std::exception& e) {
    log(e.what());
    return kExitData;
  }
  return 0;
}
