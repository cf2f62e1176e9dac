#include "rdfc/pipeline/data.hpp"

#include <cmath>
#include <cstdio>

#include "rdfc/core/random.hpp"
#include "rdfc/data/normals.hpp"
#include "rdfc/data/preprocess.hpp"
#include "rdfc/data/sparse.hpp"
#include "rdfc/data/synth.hpp"
#include "rdfc/pseudo/pseudo_depth.hpp"

namespace rdfc::pipeline {

std::vector<SampleRecord> synthetic_dataset(int n, std::uint64_t seed, int width, int height) {
  std::vector<SampleRecord> out;
  out.reserve(static_cast<std::size_t>(std::max(n, 0)));
  for (int i = 0; i < n; ++i) {
    const auto u = static_cast<std::uint64_t>(i);
    auto spec = data::random_scene_spec(derive_seed(seed, {hash_string("scene"), u}), width, height);
    char id[32];
    std::snprintf(id, sizeof id, "scene_%04d", i);
    spec.id = id;
    auto s = data::synth_scene(spec, derive_seed(seed, {hash_string("render"), u}));
    s.raw_depth = pseudo::make_pseudo_depth(s, nullptr, derive_seed(seed, {hash_string("raw"), u})).first;
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<SampleRecord> load_split(const std::filesystem::path& root, data::Split split) {
  const auto manifest = data::load_dataset(root, split);
  std::vector<SampleRecord> out;
  out.reserve(manifest.entries.size());
  for (std::size_t i = 0; i < manifest.entries.size(); ++i) out.push_back(data::load_sample(manifest, i));
  return out;
}

std::vector<SampleRecord> training_set(const TrainConfig& c) {
  if (c.data_root.empty()) return synthetic_dataset(c.synth_scenes, c.synth_seed, c.width, c.height);
  auto set = load_split(c.data_root, data::Split::kTrain);
  if (set.empty()) throw ConfigError("no training samples under " + c.data_root);
  return set;
}

SampleRecord fit_to_network(const SampleRecord& s, const TrainConfig& c, bool random, std::uint64_t seed) {
  const data::Size2 crop{c.width, c.height};
  const data::Size2 resize{c.resize_width > 0 ? c.resize_width : c.width,
                           c.resize_height > 0 ? c.resize_height : c.height};
  if (s.width() == crop.width && s.height() == crop.height) return s;
  return data::preprocess(s, resize, crop, random ? data::CropMode::kRandom : data::CropMode::kCenter, seed);
}

DepthMap setting_input(const SampleRecord& s, Setting setting, int n_sample, std::uint64_t seed) {
  switch (setting) {
    case Setting::kA:
      return s.raw_depth;
    case Setting::kB:
      return data::sample_sparse(s.raw_depth, n_sample, seed);
    case Setting::kC:
      if (!s.gt_depth) throw ConfigError("setting C needs ground-truth depth, sample '" + s.id + "' has none");
      return data::sample_sparse(*s.gt_depth, n_sample, seed);
  }
  throw ConfigError("unknown setting");
}

const DepthMap& supervision_depth(const SampleRecord& s, Supervision sup) {
  switch (sup) {
    case Supervision::kAuto:
      return s.gt_depth ? *s.gt_depth : s.raw_depth;
    case Supervision::kGt:
      if (!s.gt_depth) throw ConfigError("supervision = gt but sample '" + s.id + "' has no ground truth");
      return *s.gt_depth;
    case Supervision::kRaw:
      return s.raw_depth;
  }
  throw ConfigError("unknown supervision mode");
}

std::pair<NormalMap, Mask> normal_targets(const SampleRecord& s, const DepthMap& sup) {
  if (s.gt_normals) {
    const auto& n = *s.gt_normals;
    Mask valid(n.height(), n.width(), 1);
    for (int r = 0; r < n.height(); ++r) {
      for (int c = 0; c < n.width(); ++c) {
        const double x = n.at(r, c, 0), y = n.at(r, c, 1), z = n.at(r, c, 2);
        valid.at(r, c) = std::sqrt(x * x + y * y + z * z) > 0.5;
      }
    }
    return {n, std::move(valid)};
  }
  auto est = data::estimate_normals(sup, s.intrinsics);
  return {std::move(est.normals), std::move(est.valid)};
}

}  // namespace rdfc::pipeline
