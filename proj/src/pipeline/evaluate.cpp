#include "rdfc/pipeline/evaluate.hpp"

#include <algorithm>
#include <cmath>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "rdfc/core/io.hpp"
#include "rdfc/core/log.hpp"
#include "rdfc/core/random.hpp"
#include "rdfc/pipeline/data.hpp"
#include "rdfc/pipeline/trainer.hpp"
#include "rdfc/nn/convert.hpp"

namespace rdfc::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

DepthMap eval_input(const SampleRecord& s, const EvalOptions& o) {
  return setting_input(s, o.setting, o.n_sample, derive_seed(o.seed, {hash_string(s.id)}));
}

json to_json(const metrics::MetricsReport& m) {
  return json{{"rmse", m.rmse},
              {"rel", m.rel},
              {"delta", {{"1.25", m.delta[0]}, {"1.25^2", m.delta[1]}, {"1.25^3", m.delta[2]}}},
              {"chamfer", m.cd},
              {"chamfer_x1e4", m.cd_scaled()},
              {"precision", m.f1.precision},
              {"recall", m.f1.recall},
              {"fscore", m.f1.fscore},
              {"f1", m.f1.f1},
              {"n_valid", m.n_valid}};
}

json to_json(const EvalReport& r) {
  json samples = json::array();
  for (const auto& s : r.samples) {
    samples.push_back(json{{"id", s.id}, {"input_valid", s.input_valid}, {"metrics", to_json(s.metrics)}});
  }
  return json{{"schema", "rdfc-eval/1"},
              {"setting", to_string(r.setting)},
              {"n_sample", r.n_sample},
              {"seed", r.seed},
              {"checkpoint", r.checkpoint},
              {"n_samples", r.samples.size()},
              {"skipped", r.skipped},
              {"mean", to_json(r.mean)},
              {"samples", samples}};
}

void write_error_map(const fs::path& path, const DepthMap& pred, const DepthMap& gt, double max_error) {
  const int h = gt.height(), w = gt.width();
  cv::Mat err(h, w, CV_8UC1, cv::Scalar(0));
  cv::Mat invalid(h, w, CV_8UC1, cv::Scalar(0));
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (!(gt.at(r, c) > 0)) {
        invalid.at<std::uint8_t>(r, c) = 255;
        continue;
      }
      const double e = std::min(std::abs(pred.at(r, c) - gt.at(r, c)) / max_error, 1.0);
      err.at<std::uint8_t>(r, c) = static_cast<std::uint8_t>(std::lround(255.0 * e));
    }
  }
  cv::Mat color;
  cv::applyColorMap(err, color, cv::COLORMAP_JET);
  color.setTo(cv::Scalar(0, 0, 0), invalid);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  if (!cv::imwrite(path.string(), color)) throw IoError("cannot write " + path.string());
}

EvalReport evaluate(RdfcModel& model, const TrainConfig& config, const std::vector<SampleRecord>& samples,
                    const EvalOptions& options) {
  if (options.setting != Setting::kA && options.n_sample <= 0) {
    throw ConfigError("n_sample must be positive for settings B and C");
  }
  if (samples.empty()) throw ConfigError("evaluation set is empty");
  EvalReport report;
  report.setting = options.setting;
  report.n_sample = options.setting == Setting::kA ? 0 : options.n_sample;
  report.seed = options.seed;

  std::vector<metrics::MetricsReport> all;
  for (const auto& raw : samples) {
    if (!raw.gt_depth) throw ConfigError("evaluation needs ground truth; sample '" + raw.id + "' has none");
    const SampleRecord s = fit_to_network(raw, config, false, 0);
    const DepthMap input = eval_input(s, options);
    const auto p = infer(model, nn::to_tensor(s.rgb), nn::to_tensor(input));
    const DepthMap pred = nn::depth_from_tensor(p.d_pred);

    SampleEval e;
    e.id = s.id;
    e.input_valid = input.valid_count();
    try {
      e.metrics = metrics::evaluate_sample(pred, *s.gt_depth, s.intrinsics);
    } catch (const metrics::UndefinedMetricError& err) {
      log::warn("skipping sample '" + s.id + "': " + err.what());
      report.skipped.push_back(s.id);
      continue;
    }
    all.push_back(e.metrics);
    if (!options.out_dir.empty()) {
      write_error_map(options.out_dir / "error_maps" / (s.id + ".png"), pred, *s.gt_depth);
    }
    report.samples.push_back(std::move(e));
  }
  if (all.empty()) throw ConfigError("no sample could be scored");
  report.mean = metrics::aggregate(all);
  if (!options.out_dir.empty()) io::write_text(options.out_dir / "report.json", to_json(report).dump(2) + "\n");
  return report;
}

namespace {

DepthMap dense(DepthMap d) {
  for (auto& v : d.data()) v = std::max(v, 1e-3f);
  return d;
}

fs::path with_suffix(const fs::path& out, const std::string& suffix) {
  return out.parent_path() / (out.stem().string() + suffix + out.extension().string());
}

}  // namespace

void complete(const fs::path& checkpoint, const fs::path& rgb_path, const fs::path& depth_path, const fs::path& out_path,
              const CompleteOptions& options) {
  const RgbImage rgb = io::read_rgb_png(rgb_path);
  const DepthMap depth = io::read_depth_png(depth_path);
  if (rgb.height() != depth.height() || rgb.width() != depth.width()) {
    throw IoError("size mismatch: " + rgb_path.string() + " is " + std::to_string(rgb.width()) + "x" +
                      std::to_string(rgb.height()) + ", " + depth_path.string() + " is " +
                      std::to_string(depth.width()) + "x" + std::to_string(depth.height()));
  }
  auto loaded = load_model(checkpoint);
  const auto p = infer(loaded.model, nn::to_tensor(rgb), nn::to_tensor(depth));
  if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
  io::write_depth_png(out_path, dense(nn::depth_from_tensor(p.d_pred)));
  if (!options.side_outputs) return;

  io::write_depth_png(with_suffix(out_path, "_dl"), dense(nn::depth_from_tensor(p.local.d_l)));
  io::write_depth_png(with_suffix(out_path, "_df"), dense(nn::depth_from_tensor(p.fused.d_f)));
  // weight of the local branch, 0..65535
  const auto w_l = torch::sigmoid(p.local.c_l - p.fused.c_f)[0][0].contiguous();
  cv::Mat conf(rgb.height(), rgb.width(), CV_16UC1);
  const float* acc = w_l.data_ptr<float>();
  for (int r = 0; r < rgb.height(); ++r) {
    for (int c = 0; c < rgb.width(); ++c) {
      conf.at<std::uint16_t>(r, c) = static_cast<std::uint16_t>(std::lround(65535.0 * acc[r * rgb.width() + c]));
    }
  }
  const auto conf_path = with_suffix(out_path, "_conf");
  if (!cv::imwrite(conf_path.string(), conf)) throw IoError("cannot write " + conf_path.string());
}

}  // namespace rdfc::pipeline
