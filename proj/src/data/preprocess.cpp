#include "rdfc/data/preprocess.hpp"

#include <algorithm>

#include <opencv2/imgproc.hpp>

#include "rdfc/core/random.hpp"

namespace rdfc::data {

namespace {

// Nearest source index for a destination index under half-pixel centers.
int nearest_src(int dst, int src_len, int dst_len) {
  const double s = (dst + 0.5) * static_cast<double>(src_len) / dst_len;
  return std::clamp(static_cast<int>(s), 0, src_len - 1);
}

template <typename T>
Grid<T> resize_nearest_grid(const Grid<T>& g, Size2 size) {
  if (g.same_shape(size.height, size.width)) return g;
  Grid<T> out(size.height, size.width, g.channels());
  for (int r = 0; r < size.height; ++r) {
    const int sr = nearest_src(r, g.height(), size.height);
    for (int c = 0; c < size.width; ++c) {
      const int sc = nearest_src(c, g.width(), size.width);
      for (int ch = 0; ch < g.channels(); ++ch) out.at(r, c, ch) = g.at(sr, sc, ch);
    }
  }
  return out;
}

template <typename T>
Grid<T> crop_grid(const Grid<T>& g, Size2 offset, Size2 crop) {
  Grid<T> out(crop.height, crop.width, g.channels());
  for (int r = 0; r < crop.height; ++r) {
    for (int c = 0; c < crop.width; ++c) {
      for (int ch = 0; ch < g.channels(); ++ch) out.at(r, c, ch) = g.at(r + offset.height, c + offset.width, ch);
    }
  }
  return out;
}

template <typename T>
Grid<T> resize_and_crop(const Grid<T>& g, Size2 resize, Size2 offset, Size2 crop) {
  return crop_grid(resize_nearest_grid(g, resize), offset, crop);
}

}  // namespace

DepthMap resize_nearest(const DepthMap& d, Size2 size) {
  auto g = resize_nearest_grid<float>(d, size);
  return DepthMap(g.height(), g.width(), g.vec());
}

RgbImage resize_bilinear(const RgbImage& rgb, Size2 size) {
  if (rgb.same_shape(size.height, size.width)) return rgb;
  cv::Mat src(rgb.height(), rgb.width(), CV_32FC3, const_cast<float*>(rgb.data().data()));
  cv::Mat dst;
  cv::resize(src, dst, cv::Size(size.width, size.height), 0, 0, cv::INTER_LINEAR);
  if (!dst.isContinuous()) dst = dst.clone();
  std::vector<float> values(reinterpret_cast<const float*>(dst.data),
                            reinterpret_cast<const float*>(dst.data) + dst.total() * 3);
  for (auto& v : values) v = std::clamp(v, 0.0f, 1.0f);
  return RgbImage(size.height, size.width, std::move(values));
}

Size2 crop_offset(Size2 resize, Size2 crop, CropMode mode, std::uint64_t seed) {
  if (crop.width <= 0 || crop.height <= 0 || resize.width <= 0 || resize.height <= 0) {
    throw ParameterError("preprocess: sizes must be positive");
  }
  if (crop.width > resize.width || crop.height > resize.height) {
    throw ParameterError("preprocess: crop " + std::to_string(crop.width) + "x" + std::to_string(crop.height) +
                         " exceeds resize " + std::to_string(resize.width) + "x" + std::to_string(resize.height));
  }
  const int slack_w = resize.width - crop.width;
  const int slack_h = resize.height - crop.height;
  if (mode == CropMode::kCenter) return {slack_w / 2, slack_h / 2};
  Rng rng(derive_seed(seed, {0x63726f70}));
  const int ox = static_cast<int>(rng.below(static_cast<std::uint64_t>(slack_w) + 1));
  const int oy = static_cast<int>(rng.below(static_cast<std::uint64_t>(slack_h) + 1));
  return {ox, oy};
}

SampleRecord preprocess(const SampleRecord& s, Size2 resize, Size2 crop, CropMode mode, std::uint64_t seed) {
  s.check_consistent();
  const Size2 off = crop_offset(resize, crop, mode, seed);

  SampleRecord out;
  out.id = s.id;
  {
    const RgbImage resized = resize_bilinear(s.rgb, resize);
    out.rgb = RgbImage(crop.height, crop.width, crop_grid<float>(resized, off, crop).vec());
  }
  auto depth = [&](const DepthMap& d) {
    return DepthMap(crop.height, crop.width, resize_and_crop<float>(d, resize, off, crop).vec());
  };
  out.raw_depth = depth(s.raw_depth);
  if (s.gt_depth) out.gt_depth = depth(*s.gt_depth);
  if (s.seg) out.seg = SegMask(resize_and_crop(s.seg->labels(), resize, off, crop), s.seg->classes());
  if (s.gt_normals) {
    out.gt_normals = NormalMap(crop.height, crop.width, resize_and_crop<float>(*s.gt_normals, resize, off, crop).vec());
  }
  const double sx = static_cast<double>(resize.width) / s.width();
  const double sy = static_cast<double>(resize.height) / s.height();
  out.intrinsics = s.intrinsics.scaled(sx, sy).shifted(off.width, off.height);
  return out;
}

}  // namespace rdfc::data
