#pragma once

#include <cstdint>

#include "rdfc/core/types.hpp"

namespace rdfc::data {

struct Size2 {
  int width = 0;
  int height = 0;
  bool operator==(const Size2&) const = default;
};

enum class CropMode { kCenter, kRandom };

/// Resizes every channel of the sample to `resize`, then crops a `crop`
/// window (centered, or drawn from `seed`). Depth, labels and normals use
/// nearest-neighbor sampling; rgb uses bilinear. Intrinsics are scaled by the
/// resize ratio and shifted by the crop offset.
/// Throws ParameterError when the crop exceeds the resized image.
SampleRecord preprocess(const SampleRecord& s, Size2 resize, Size2 crop, CropMode mode, std::uint64_t seed);

/// Top-left offset of the crop window that `preprocess` would use.
Size2 crop_offset(Size2 resize, Size2 crop, CropMode mode, std::uint64_t seed);

DepthMap resize_nearest(const DepthMap& d, Size2 size);
RgbImage resize_bilinear(const RgbImage& rgb, Size2 size);

}  // namespace rdfc::data
