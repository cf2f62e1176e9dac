#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "rdfc/core/types.hpp"

namespace rdfc::data {

/// Segmentation labels used by synthetic scenes.
namespace synth_labels {
inline constexpr std::int32_t kFloor = 1;
inline constexpr std::int32_t kCeiling = 2;
inline constexpr std::int32_t kWall = 3;
inline constexpr std::int32_t kObject = 4;
inline constexpr std::int32_t kReflective = 5;
}  // namespace synth_labels

std::map<std::int32_t, PlaneClass> synth_plane_classes();

struct Vec3 {
  double x = 0, y = 0, z = 0;
};

/// Axis-aligned box resting inside the room. Rendered as plane class "other".
struct SynthBox {
  Vec3 min;
  Vec3 max;
  std::array<float, 3> color{0.5f, 0.5f, 0.5f};
  bool reflective = false;
};

/// A Manhattan room [0,size.x] x [0,size.y] x [0,size.z] (meters, z up) seen
/// from a pinhole camera. Yaw rotates about +z; pitch and roll default to 0,
/// which keeps the camera gravity-aligned.
struct SynthSceneSpec {
  Vec3 room_size{5.0, 5.0, 3.0};
  Vec3 camera_position{2.5, 1.0, 1.5};
  double yaw = 1.5707963267948966;  // radians; pi/2 looks along +y
  double pitch = 0.0;               // radians, positive looks up
  double roll = 0.0;                // radians about the viewing axis
  int width = 64;
  int height = 48;
  double focal_scale = 0.81;        // fx = fy = focal_scale * width
  std::uint64_t texture_seed = 0;
  double texture_noise = 0.04;      // multiplicative color noise amplitude
  bool ceiling_lamp = true;         // saturated white patch on the ceiling
  std::vector<SynthBox> boxes;
  std::string id = "synth";

  CameraIntrinsics intrinsics() const;
};

/// Rendered scene plus the per-pixel face index (room faces 0..5, box faces
/// 6 + 6 * box + face), which locates face boundaries.
struct SynthRender {
  SampleRecord sample;
  Grid<std::int32_t> face_id;
};

/// Analytic render: gt depth by ray casting, face normals in the camera's
/// gravity frame, plane-class segmentation, textured rgb. raw_depth equals
/// gt_depth. Throws ParameterError when the camera is outside the room or
/// inside a box, or the spec is degenerate.
SynthRender render_scene(const SynthSceneSpec& spec, std::uint64_t seed);
SampleRecord synth_scene(const SynthSceneSpec& spec, std::uint64_t seed);

/// Draws a random gravity-aligned room with 1-3 boxes.
SynthSceneSpec random_scene_spec(std::uint64_t seed, int width, int height);

/// Every plane of the scene as (unit normal n, offset o) with n.p = o in
/// camera coordinates (x right, y down, z forward). For test oracles.
std::vector<std::array<double, 4>> scene_planes_camera(const SynthSceneSpec& spec);

}  // namespace rdfc::data
