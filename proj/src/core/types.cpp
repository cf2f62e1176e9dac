#include "rdfc/core/types.hpp"

#include <cmath>

namespace rdfc {

namespace {

void check_depth_values(std::span<const float> values) {
  for (float v : values) {
    if (!std::isfinite(v) || v < 0.0f) {
      throw ParameterError("DepthMap: values must be finite and non-negative");
    }
  }
}

}  // namespace

DepthMap::DepthMap(int height, int width, float fill) : Grid<float>(height, width, 1, fill) {
  check_depth_values(data());
}

DepthMap::DepthMap(int height, int width, std::vector<float> meters)
    : Grid<float>(height, width, 1, std::move(meters)) {
  check_depth_values(data());
}

std::size_t DepthMap::valid_count() const {
  std::size_t n = 0;
  for (float v : data()) n += v > 0.0f;
  return n;
}

RgbImage::RgbImage(int height, int width, float fill) : Grid<float>(height, width, 3, fill) {
  if (!(fill >= 0.0f && fill <= 1.0f)) throw ParameterError("RgbImage: values must lie in [0,1]");
}

RgbImage::RgbImage(int height, int width, std::vector<float> values)
    : Grid<float>(height, width, 3, std::move(values)) {
  for (float v : data()) {
    if (!(v >= 0.0f && v <= 1.0f)) throw ParameterError("RgbImage: values must lie in [0,1]");
  }
}

ConfidenceMap::ConfidenceMap(int height, int width, std::vector<float> values)
    : Grid<float>(height, width, 1, std::move(values)) {
  for (float v : data()) {
    if (!std::isfinite(v)) throw ParameterError("ConfidenceMap: values must be finite");
  }
}

std::string to_string(PlaneClass c) {
  switch (c) {
    case PlaneClass::kFloor:
      return "floor";
    case PlaneClass::kCeiling:
      return "ceiling";
    case PlaneClass::kWall:
      return "wall";
    case PlaneClass::kOther:
      break;
  }
  return "other";
}

PlaneClass plane_class_from_string(const std::string& name) {
  if (name == "floor") return PlaneClass::kFloor;
  if (name == "ceiling") return PlaneClass::kCeiling;
  if (name == "wall") return PlaneClass::kWall;
  if (name == "other") return PlaneClass::kOther;
  throw ParameterError("unknown plane class '" + name + "'");
}

SegMask::SegMask(Grid<std::int32_t> labels, std::map<std::int32_t, PlaneClass> classes)
    : labels_(std::move(labels)), classes_(std::move(classes)) {
  for (auto l : labels_.data()) {
    if (!classes_.contains(l)) {
      throw ParameterError("SegMask: label " + std::to_string(l) + " has no plane class");
    }
  }
}

Grid<std::uint8_t> SegMask::class_codes() const {
  Grid<std::uint8_t> out(height(), width(), 1);
  auto src = labels_.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = static_cast<std::uint8_t>(classes_.at(src[i]));
  return out;
}

CameraIntrinsics::CameraIntrinsics(double fx_, double fy_, double cx_, double cy_)
    : fx(fx_), fy(fy_), cx(cx_), cy(cy_) {
  if (!(fx > 0.0) || !(fy > 0.0) || !std::isfinite(cx) || !std::isfinite(cy)) {
    throw ParameterError("CameraIntrinsics: focal lengths must be positive");
  }
}

CameraIntrinsics CameraIntrinsics::from_matrix(const std::array<double, 9>& k) {
  if (k[1] != 0.0 || k[3] != 0.0 || k[6] != 0.0 || k[7] != 0.0 || k[8] != 1.0) {
    throw ParameterError("CameraIntrinsics: matrix is not a zero-skew pinhole K");
  }
  return {k[0], k[4], k[2], k[5]};
}

void SampleRecord::check_consistent() const {
  const int h = rgb.height();
  const int w = rgb.width();
  auto check = [&](const auto& g, const char* what) {
    if (!g.same_shape(h, w)) {
      throw ParameterError("sample '" + id + "': " + what + " size does not match rgb");
    }
  };
  check(raw_depth, "raw_depth");
  if (gt_depth) check(*gt_depth, "gt_depth");
  if (gt_normals) check(*gt_normals, "gt_normals");
  if (seg && (seg->height() != h || seg->width() != w)) {
    throw ParameterError("sample '" + id + "': seg size does not match rgb");
  }
}

Mask validity_mask(const DepthMap& d) {
  Mask m(d.height(), d.width(), 1);
  auto src = d.data();
  auto dst = m.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] > 0.0f ? 1 : 0;
  return m;
}

}  // namespace rdfc
