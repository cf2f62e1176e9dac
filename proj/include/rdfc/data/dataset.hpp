#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rdfc/core/types.hpp"

namespace rdfc::data {

namespace fs = std::filesystem;

enum class Split { kTrain, kTest };

std::string to_string(Split s);
Split split_from_string(const std::string& s);

struct ManifestEntry {
  std::string id;
  fs::path rgb;
  fs::path raw_depth;
  std::optional<fs::path> gt_depth;
  std::optional<fs::path> seg;
};

/// Samples of one split, ordered by id. Layout on disk:
///   <root>/<split>/{rgb,raw_depth,gt_depth,seg}/<id>.png
///   <root>/intrinsics.txt       nine reals, row-major K
///   <root>/plane_classes.txt    "label class_name" per line
struct DatasetManifest {
  fs::path root;
  Split split = Split::kTrain;
  CameraIntrinsics intrinsics;
  std::map<std::int32_t, PlaneClass> plane_classes;
  std::vector<ManifestEntry> entries;

  std::size_t size() const { return entries.size(); }
};

/// Scans and validates a split. Every sample must have rgb and raw depth of
/// equal size; gt depth and segmentation are optional but size-checked.
/// Throws IoError on a missing directory or a malformed file.
DatasetManifest load_dataset(const fs::path& root, Split split);

/// Decodes one manifest entry into a SampleRecord.
SampleRecord load_sample(const DatasetManifest& manifest, std::size_t index);

/// Writes a sample (and, when absent, the shared intrinsics / class tables)
/// into the on-disk layout.
void write_sample(const fs::path& root, Split split, const SampleRecord& sample);

}  // namespace rdfc::data
