// Command-line front end: training, evaluation, completion and data tools.
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "rdfc/core/io.hpp"
#include "rdfc/core/log.hpp"
#include "rdfc/core/random.hpp"
#include "rdfc/data/dataset.hpp"
#include "rdfc/metrics/metrics.hpp"
#include "rdfc/pipeline/data.hpp"
#include "rdfc/pipeline/evaluate.hpp"
#include "rdfc/pipeline/trainer.hpp"
#include "rdfc/pseudo/pseudo_depth.hpp"

namespace fs = std::filesystem;
using namespace rdfc;
using nlohmann::json;

namespace {

// Held-out synthetic scenes used when a config has no data_root.
std::vector<SampleRecord> synthetic_test_set(const pipeline::TrainConfig& c, int n) {
  return pipeline::synthetic_dataset(n, derive_seed(c.synth_seed, {hash_string("test")}), c.width, c.height);
}

int cmd_train(const fs::path& config_path, const fs::path& out, const fs::path& resume) {
  auto config = pipeline::load_config(config_path);
  auto samples = pipeline::training_set(config);
  auto trainer = resume.empty() ? pipeline::Trainer(config, std::move(samples))
                                : pipeline::Trainer::resume(resume, std::move(samples));
  log::info("training " + std::to_string(trainer.samples().size()) + " samples, " +
            std::to_string(trainer.total_steps()) + " steps from step " + std::to_string(trainer.global_step()));
  const auto t0 = std::chrono::steady_clock::now();
  trainer.run();
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  trainer.save(out);
  char line[160];
  std::snprintf(line, sizeof line, "done in %.1f s, training-set rmse %.4f m; checkpoint %s", secs,
                trainer.training_rmse(), out.string().c_str());
  log::info(line);
  return 0;
}

int cmd_evaluate(const fs::path& ckpt, const std::string& setting, std::uint64_t seed, int n_sample,
                 const fs::path& data, const fs::path& out) {
  auto loaded = pipeline::load_model(ckpt);
  pipeline::EvalOptions o;
  o.setting = pipeline::setting_from_string(setting);
  o.seed = seed;
  o.n_sample = n_sample;
  o.out_dir = out;
  std::vector<SampleRecord> samples;
  if (!data.empty()) {
    samples = pipeline::load_split(data, data::Split::kTest);
  } else if (!loaded.config.data_root.empty()) {
    samples = pipeline::load_split(loaded.config.data_root, data::Split::kTest);
  } else {
    samples = synthetic_test_set(loaded.config, 8);
  }
  auto report = pipeline::evaluate(loaded.model, loaded.config, samples, o);
  report.checkpoint = ckpt.filename().string();
  const auto j = pipeline::to_json(report);
  if (!out.empty()) io::write_text(out / "report.json", j.dump(2) + "\n");
  std::cout << j["mean"].dump(2) << "\n";
  return 0;
}

int cmd_synth(int n, int n_test, const fs::path& out, std::uint64_t seed, int width, int height) {
  auto write = [&](data::Split split, const std::vector<SampleRecord>& set) {
    for (const auto& s : set) data::write_sample(out, split, s);
  };
  write(data::Split::kTrain, pipeline::synthetic_dataset(n, seed, width, height));
  write(data::Split::kTest,
        pipeline::synthetic_dataset(n_test, derive_seed(seed, {hash_string("test")}), width, height));
  log::info("wrote " + std::to_string(n) + " train and " + std::to_string(n_test) + " test scenes to " +
            out.string());
  return 0;
}

int cmd_pseudo(const fs::path& root, const std::string& split, std::uint64_t seed, const fs::path& out) {
  const auto manifest = data::load_dataset(root, data::split_from_string(split));
  fs::create_directories(out);
  const pseudo::PseudoConfig cfg;
  const json params{{"method_probability", cfg.method_probability},
                    {"highlight",
                     {{"threshold", cfg.highlight.threshold},
                      {"min_component", cfg.highlight.min_component},
                      {"dilation", cfg.highlight.dilation}}},
                    {"black_threshold", "5/255"},
                    {"graphseg",
                     {{"k", cfg.graph.k},
                      {"sigma", cfg.graph.sigma},
                      {"min_size", cfg.graph.min_size},
                      {"small_area_fraction", cfg.graph.small_area_fraction},
                      {"select_probability", cfg.graph.select_probability}}},
                    {"semantic_labels", cfg.semantic_labels},
                    {"semantic_max_instances", cfg.semantic_max_instances},
                    {"seg_noise_band", cfg.seg_noise_band},
                    {"seg_noise_flip", cfg.seg_noise_flip}};
  for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
    const auto s = data::load_sample(manifest, i);
    const auto [depth, masks] = pseudo::make_pseudo_depth(s, nullptr, derive_seed(seed, {hash_string(s.id)}), cfg);
    io::write_depth_png(out / (s.id + ".png"), depth);
    json methods = json::object();
    for (int m = 0; m < pseudo::kMethodCount; ++m) {
      const auto method = static_cast<pseudo::Method>(m);
      methods[pseudo::to_string(method)] = {{"applied", masks.was_applied(method)},
                                            {"pixels", count_set(masks[method])}};
    }
    const json sidecar{{"id", s.id},
                       {"seed", seed},
                       {"raw_valid", s.raw_depth.valid_count()},
                       {"pseudo_valid", depth.valid_count()},
                       {"methods", methods},
                       {"params", params}};
    io::write_text(out / (s.id + ".json"), sidecar.dump(2) + "\n");
  }
  log::info("wrote " + std::to_string(manifest.entries.size()) + " pseudo depth maps to " + out.string());
  return 0;
}

int cmd_metrics(const fs::path& pred, const fs::path& gt, const fs::path& intrinsics, const fs::path& out) {
  const auto k = io::read_intrinsics(intrinsics);
  json j;
  if (fs::is_directory(pred)) {
    // every <name>.png in pred with a counterpart in gt; unscorable pairs are skipped
    std::vector<fs::path> names;
    for (const auto& e : fs::directory_iterator(pred)) {
      if (e.path().extension() == ".png" && fs::exists(gt / e.path().filename())) names.push_back(e.path().filename());
    }
    std::sort(names.begin(), names.end());
    std::vector<metrics::MetricsReport> reports;
    json samples = json::array(), skipped = json::array();
    for (const auto& name : names) {
      try {
        reports.push_back(metrics::evaluate_sample(io::read_depth_png(pred / name), io::read_depth_png(gt / name), k));
        samples.push_back({{"id", name.stem().string()}, {"metrics", pipeline::to_json(reports.back())}});
      } catch (const metrics::UndefinedMetricError& e) {
        log::warn("skipping " + name.string() + ": " + e.what());
        skipped.push_back(name.stem().string());
      }
    }
    if (reports.empty()) throw IoError("no scorable prediction/gt pairs under " + pred.string());
    j = {{"n_samples", reports.size()},
         {"skipped", skipped},
         {"mean", pipeline::to_json(metrics::aggregate(reports))},
         {"samples", samples}};
  } else {
    j = pipeline::to_json(
        metrics::evaluate_sample(io::read_depth_png(pred), io::read_depth_png(gt), k));
  }
  const auto text = j.dump(2) + "\n";
  if (!out.empty()) io::write_text(out, text);
  std::cout << text;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RGB-D depth completion: training, evaluation and tools"};
  app.require_subcommand(1);
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "only log warnings and errors");

  auto* train = app.add_subcommand("train", "train a model from a config file");
  fs::path config_path, train_out = "rdfc.ckpt", resume;
  train->add_option("--config", config_path, "config file (key = value)")->required()->check(CLI::ExistingFile);
  train->add_option("--out", train_out, "final checkpoint path");
  train->add_option("--resume", resume, "continue from this checkpoint")->check(CLI::ExistingFile);

  auto* eval = app.add_subcommand("evaluate", "score a checkpoint in setting A, B or C");
  fs::path ckpt, data_root, eval_out;
  std::string setting = "A";
  std::uint64_t seed = 0;
  int n_sample = 500;
  eval->add_option("--ckpt", ckpt, "checkpoint")->required()->check(CLI::ExistingFile);
  eval->add_option("--setting", setting, "A | B | C")->required()->check(CLI::IsMember({"A", "B", "C"}));
  eval->add_option("--seed", seed, "seed of the sparse sampling")->required();
  eval->add_option("--n-sample", n_sample, "samples per image in settings B and C");
  eval->add_option("--data", data_root, "dataset root (test split); default: the training config's data");
  eval->add_option("--out", eval_out, "directory for report.json and error maps");

  auto* comp = app.add_subcommand("complete", "complete one depth map");
  fs::path comp_ckpt, rgb, depth, comp_out;
  bool side = false;
  comp->add_option("--ckpt", comp_ckpt, "checkpoint")->required()->check(CLI::ExistingFile);
  comp->add_option("--rgb", rgb, "rgb PNG")->required();
  comp->add_option("--depth", depth, "16-bit millimeter depth PNG")->required();
  comp->add_option("--out", comp_out, "output depth PNG")->required();
  comp->add_flag("--side-outputs", side, "also write the branch depths and the local-branch weight");

  auto* synth = app.add_subcommand("synth-data", "render a synthetic dataset");
  int n = 16, n_test = 4, width = 64, height = 48;
  fs::path synth_out;
  std::uint64_t synth_seed = 1;
  synth->add_option("--n", n, "training scenes")->required()->check(CLI::NonNegativeNumber);
  synth->add_option("--n-test", n_test, "test scenes")->check(CLI::NonNegativeNumber);
  synth->add_option("--out", synth_out, "dataset root")->required();
  synth->add_option("--seed", synth_seed, "scene seed");
  synth->add_option("--width", width, "image width")->check(CLI::PositiveNumber);
  synth->add_option("--height", height, "image height")->check(CLI::PositiveNumber);

  auto* pgen = app.add_subcommand("pseudo-gen", "write pseudo depth maps for a dataset split");
  fs::path pgen_root, pgen_out;
  std::string split = "train";
  std::uint64_t pgen_seed = 0;
  pgen->add_option("--root", pgen_root, "dataset root")->required();
  pgen->add_option("--split", split, "train | test");
  pgen->add_option("--seed", pgen_seed, "seed");
  pgen->add_option("--out", pgen_out, "output directory")->required();

  auto* met = app.add_subcommand("metrics", "score predicted depth PNGs against gt (files or directories)");
  fs::path pred, gt, intr, met_out;
  met->add_option("--pred", pred, "predicted depth PNG or directory")->required();
  met->add_option("--gt", gt, "ground-truth depth PNG or directory")->required();
  met->add_option("--intrinsics", intr, "intrinsics.txt (3x3 row-major)")->required();
  met->add_option("--out", met_out, "JSON output path");

  CLI11_PARSE(app, argc, argv);
  if (quiet) log::set_level(log::Level::kWarn);

  try {
    if (*train) return cmd_train(config_path, train_out, resume);
    if (*eval) return cmd_evaluate(ckpt, setting, seed, n_sample, data_root, eval_out);
    if (*comp) {
      pipeline::complete(comp_ckpt, rgb, depth, comp_out, {side});
      return 0;
    }
    if (*synth) return cmd_synth(n, n_test, synth_out, synth_seed, width, height);
    if (*pgen) return cmd_pseudo(pgen_root, split, pgen_seed, pgen_out);
    if (*met) return cmd_metrics(pred, gt, intr, met_out);
  } catch (const pipeline::ConfigError& e) {
    log::error(e.what());
    return 2;
  } catch (const IoError& e) {
    log::error(e.what());
    return 3;
  } catch (const std::exception& e) {
    log::error(e.what());
    return 1;
  }
  return 0;
}
