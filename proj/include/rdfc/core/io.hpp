#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>

#include "rdfc/core/types.hpp"

namespace rdfc {

/// Unreadable, unwritable or malformed files. The message names the path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace io {

namespace fs = std::filesystem;

// Depth: 16-bit grayscale PNG in millimeters, 0 = missing. Positive depths
// below half a millimeter are stored as 1 mm so they stay valid.
DepthMap read_depth_png(const fs::path& path);
void write_depth_png(const fs::path& path, const DepthMap& depth);
std::uint16_t encode_depth_mm(float meters);
float decode_depth_mm(std::uint16_t mm);

RgbImage read_rgb_png(const fs::path& path);
void write_rgb_png(const fs::path& path, const RgbImage& rgb);

// Segmentation: 8-bit single-channel label PNG; plane classes come from a
// separate "label class_name" table.
Grid<std::int32_t> read_label_png(const fs::path& path);
void write_label_png(const fs::path& path, const Grid<std::int32_t>& labels);

std::map<std::int32_t, PlaneClass> read_plane_classes(const fs::path& path);
void write_plane_classes(const fs::path& path, const std::map<std::int32_t, PlaneClass>& classes);

/// Nine whitespace-separated reals, row-major K.
CameraIntrinsics read_intrinsics(const fs::path& path);
void write_intrinsics(const fs::path& path, const CameraIntrinsics& k);

void write_text(const fs::path& path, const std::string& text);
std::string read_text(const fs::path& path);

}  // namespace io
}  // namespace rdfc
