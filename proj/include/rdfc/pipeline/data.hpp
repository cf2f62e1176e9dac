#pragma once

#include <cstdint>
#include <vector>

#include <torch/torch.h>

#include "rdfc/data/dataset.hpp"
#include "rdfc/pipeline/config.hpp"

namespace rdfc::pipeline {

/// `n` random synthetic rooms. gt_depth and gt_normals are exact; raw_depth
/// is the gt corrupted once by the pseudo-depth generator (fixed seed), so
/// the set looks like sensor data with holes.
std::vector<SampleRecord> synthetic_dataset(int n, std::uint64_t seed, int width, int height);

/// Every sample of a split, in manifest order.
std::vector<SampleRecord> load_split(const std::filesystem::path& root, data::Split split);

/// Training set named by the config: data_root/train, or synthetic scenes.
std::vector<SampleRecord> training_set(const TrainConfig& config);

/// Resizes and crops to the configured network size. Center crops unless
/// `random` is set. Samples already at the target size pass through.
SampleRecord fit_to_network(const SampleRecord& s, const TrainConfig& config, bool random, std::uint64_t seed);

/// The depth map a setting feeds the network. Throws ConfigError for
/// setting C on a sample without gt.
DepthMap setting_input(const SampleRecord& s, Setting setting, int n_sample, std::uint64_t seed);

/// Depth the losses supervise against; ConfigError if unavailable.
const DepthMap& supervision_depth(const SampleRecord& s, Supervision sup);

/// Stacked tensors of one training batch.
struct Batch {
  torch::Tensor rgb;      // [B,3,H,W]
  torch::Tensor input;    // [B,1,H,W] network depth input
  torch::Tensor sup;      // [B,1,H,W] supervision (0 = hole); also the critics' real depth
  torch::Tensor n_star;   // [B,3,H,W] ground-truth normals
  torch::Tensor n_valid;  // [B,1,H,W] bool
  torch::Tensor classes;  // [B,H,W] plane class codes
  std::vector<std::string> ids;
};

/// Ground-truth normals of a prepared sample: analytic when present,
/// otherwise fitted on the supervision depth.
std::pair<NormalMap, Mask> normal_targets(const SampleRecord& s, const DepthMap& sup);

}  // namespace rdfc::pipeline
