#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rdfc/core/grid.hpp"

namespace rdfc {

/// Metric depth in meters. A value of exactly 0 marks a missing pixel;
/// every other value is strictly positive and finite.
class DepthMap : public Grid<float> {
 public:
  DepthMap() : Grid<float>(0, 0, 1) {}
  DepthMap(int height, int width, float fill = 0.0f);
  DepthMap(int height, int width, std::vector<float> meters);

  bool valid(int row, int col) const { return at(row, col) > 0.0f; }
  std::size_t valid_count() const;
};

/// Color image with every channel in [0, 1].
class RgbImage : public Grid<float> {
 public:
  RgbImage() : Grid<float>(0, 0, 3) {}
  RgbImage(int height, int width, float fill = 0.0f);
  RgbImage(int height, int width, std::vector<float> values);
};

/// Per-pixel surface normals, expressed in the gravity-aligned camera frame
/// (x right, y forward, z up).
class NormalMap : public Grid<float> {
 public:
  NormalMap() : Grid<float>(0, 0, 3) {}
  NormalMap(int height, int width) : Grid<float>(height, width, 3) {}
  NormalMap(int height, int width, std::vector<float> values)
      : Grid<float>(height, width, 3, std::move(values)) {}

  std::array<float, 3> normal(int row, int col) const {
    return {at(row, col, 0), at(row, col, 1), at(row, col, 2)};
  }
  void set(int row, int col, const std::array<float, 3>& n) {
    for (int c = 0; c < 3; ++c) at(row, col, c) = n[c];
  }
};

/// Unbounded per-pixel confidence logits.
class ConfidenceMap : public Grid<float> {
 public:
  ConfidenceMap() : Grid<float>(0, 0, 1) {}
  ConfidenceMap(int height, int width, float fill = 0.0f) : Grid<float>(height, width, 1, fill) {}
  ConfidenceMap(int height, int width, std::vector<float> values);
};

enum class PlaneClass : std::uint8_t { kOther = 0, kFloor = 1, kCeiling = 2, kWall = 3 };

std::string to_string(PlaneClass c);
PlaneClass plane_class_from_string(const std::string& name);

/// Integer label image plus the label -> plane class table.
class SegMask {
 public:
  SegMask() = default;
  SegMask(Grid<std::int32_t> labels, std::map<std::int32_t, PlaneClass> classes);

  int height() const { return labels_.height(); }
  int width() const { return labels_.width(); }
  std::int32_t label(int row, int col) const { return labels_.at(row, col); }
  PlaneClass plane_class(int row, int col) const { return classes_.at(labels_.at(row, col)); }
  const Grid<std::int32_t>& labels() const { return labels_; }
  const std::map<std::int32_t, PlaneClass>& classes() const { return classes_; }

  /// Per-pixel plane class codes (PlaneClass values), row-major.
  Grid<std::uint8_t> class_codes() const;

  bool operator==(const SegMask&) const = default;

 private:
  Grid<std::int32_t> labels_;
  std::map<std::int32_t, PlaneClass> classes_;
};

/// Pinhole intrinsics with zero skew.
struct CameraIntrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;

  CameraIntrinsics() = default;
  CameraIntrinsics(double fx, double fy, double cx, double cy);
  /// Row-major 3x3 matrix; skew and the bottom row must match a pinhole K.
  static CameraIntrinsics from_matrix(const std::array<double, 9>& k);
  std::array<double, 9> matrix() const { return {fx, 0, cx, 0, fy, cy, 0, 0, 1}; }

  CameraIntrinsics scaled(double sx, double sy) const { return {fx * sx, fy * sy, cx * sx, cy * sy}; }
  CameraIntrinsics shifted(double dx, double dy) const { return {fx, fy, cx - dx, cy - dy}; }

  bool operator==(const CameraIntrinsics&) const = default;
};

struct Point3 {
  double x = 0, y = 0, z = 0;
  bool operator==(const Point3&) const = default;
};

using PointCloud = std::vector<Point3>;

/// One co-registered sample. All present images share the same height and width.
struct SampleRecord {
  std::string id;
  RgbImage rgb;
  DepthMap raw_depth;
  std::optional<DepthMap> gt_depth;
  std::optional<SegMask> seg;
  CameraIntrinsics intrinsics;
  std::optional<NormalMap> gt_normals;

  int height() const { return rgb.height(); }
  int width() const { return rgb.width(); }
  /// Throws ParameterError if any present image disagrees in size with rgb.
  void check_consistent() const;
};

/// mask(r, c) is set exactly where d(r, c) > 0.
Mask validity_mask(const DepthMap& d);

}  // namespace rdfc
