#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "rdfc/metrics/metrics.hpp"
#include "rdfc/pipeline/model.hpp"

namespace rdfc::pipeline {

struct EvalOptions {
  Setting setting = Setting::kA;
  int n_sample = 500;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir;  // empty: no files written
};

struct SampleEval {
  std::string id;
  std::size_t input_valid = 0;  // valid pixels of the network input
  metrics::MetricsReport metrics;
};

struct EvalReport {
  Setting setting = Setting::kA;
  int n_sample = 0;
  std::uint64_t seed = 0;
  std::string checkpoint;
  metrics::MetricsReport mean;
  std::vector<SampleEval> samples;
  std::vector<std::string> skipped;  // samples whose metrics were undefined
};

/// Input depth of one evaluation sample; the sparse draw is seeded by
/// (seed, sample id).
DepthMap eval_input(const SampleRecord& s, const EvalOptions& options);

/// Runs inference on every sample (one at a time, eval mode) and scores
/// d_pred against gt. Samples with undefined metrics are skipped and logged.
/// Throws ConfigError when a sample lacks gt or the options are invalid.
/// Writes report.json and error maps when out_dir is set.
EvalReport evaluate(RdfcModel& model, const TrainConfig& config, const std::vector<SampleRecord>& samples,
                    const EvalOptions& options);

nlohmann::json to_json(const metrics::MetricsReport& m);
nlohmann::json to_json(const EvalReport& r);

/// |pred - gt| colorized (black where gt is missing), scaled to `max_error`
/// meters.
void write_error_map(const std::filesystem::path& path, const DepthMap& pred, const DepthMap& gt,
                     double max_error = 1.0);

struct CompleteOptions {
  bool side_outputs = false;  // also write <stem>_dl.png, <stem>_df.png, <stem>_conf.png
};

/// Depth completion of one co-registered rgb/depth pair with a trained
/// checkpoint. Writes d_pred as a 16-bit millimeter PNG. Throws IoError for
/// unreadable or size-mismatched inputs.
void complete(const std::filesystem::path& checkpoint, const std::filesystem::path& rgb_path,
              const std::filesystem::path& depth_path, const std::filesystem::path& out_path,
              const CompleteOptions& options = {});

}  // namespace rdfc::pipeline
