#include "rdfc/data/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rdfc/core/random.hpp"

namespace rdfc::data {

namespace {

double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
Vec3 add(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
Vec3 scale(const Vec3& a, double s) { return {a.x * s, a.y * s, a.z * s}; }
double comp(const Vec3& v, int axis) { return axis == 0 ? v.x : axis == 1 ? v.y : v.z; }
Vec3 axis_vec(int axis, double sign) {
  Vec3 v;
  (axis == 0 ? v.x : axis == 1 ? v.y : v.z) = sign;
  return v;
}

struct CameraFrame {
  Vec3 right, up, forward;
};

CameraFrame camera_frame(const SynthSceneSpec& s) {
  const Vec3 f0{std::cos(s.yaw), std::sin(s.yaw), 0.0};
  const Vec3 r0{std::sin(s.yaw), -std::cos(s.yaw), 0.0};
  const Vec3 u0{0.0, 0.0, 1.0};
  const double cp = std::cos(s.pitch), sp = std::sin(s.pitch);
  const Vec3 f1 = add(scale(f0, cp), scale(u0, sp));
  const Vec3 u1 = add(scale(f0, -sp), scale(u0, cp));
  const double cr = std::cos(s.roll), sr = std::sin(s.roll);
  const Vec3 r2 = add(scale(r0, cr), scale(u1, sr));
  const Vec3 u2 = add(scale(r0, -sr), scale(u1, cr));
  return {r2, u2, f1};
}

bool inside_box(const Vec3& p, const SynthBox& b) {
  return p.x > b.min.x && p.x < b.max.x && p.y > b.min.y && p.y < b.max.y && p.z > b.min.z && p.z < b.max.z;
}

void validate(const SynthSceneSpec& s) {
  const auto& r = s.room_size;
  if (!(r.x > 0 && r.y > 0 && r.z > 0)) throw ParameterError("synth_scene: room dimensions must be positive");
  if (s.width < 1 || s.height < 1) throw ParameterError("synth_scene: image size must be positive");
  if (!(s.focal_scale > 0)) throw ParameterError("synth_scene: focal_scale must be positive");
  const auto& c = s.camera_position;
  if (!(c.x > 0 && c.x < r.x && c.y > 0 && c.y < r.y && c.z > 0 && c.z < r.z)) {
    throw ParameterError("synth_scene: camera must lie strictly inside the room");
  }
  for (const auto& b : s.boxes) {
    if (!(b.min.x < b.max.x && b.min.y < b.max.y && b.min.z < b.max.z)) {
      throw ParameterError("synth_scene: box extents must be positive");
    }
    if (inside_box(c, b)) throw ParameterError("synth_scene: camera lies inside a box");
  }
}

std::array<float, 3> face_color(int face, const SynthSceneSpec& s) {
  if (face >= 6) return s.boxes[static_cast<std::size_t>((face - 6) / 6)].color;
  Rng rng(derive_seed(s.texture_seed, {0x66616365, static_cast<std::uint64_t>(face)}));
  switch (face) {
    case 4:  // floor
      return {static_cast<float>(rng.uniform(0.35, 0.55)), static_cast<float>(rng.uniform(0.25, 0.4)),
              static_cast<float>(rng.uniform(0.15, 0.3))};
    case 5:  // ceiling
      return {0.85f, 0.85f, static_cast<float>(rng.uniform(0.78, 0.85))};
    default: {
      const float base = static_cast<float>(rng.uniform(0.45, 0.75));
      return {base + static_cast<float>(rng.uniform(-0.1, 0.1)), base + static_cast<float>(rng.uniform(-0.1, 0.1)),
              base + static_cast<float>(rng.uniform(-0.1, 0.1))};
    }
  }
}

float quantize8(double v) { return static_cast<float>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)) / 255.0f; }

}  // namespace

std::map<std::int32_t, PlaneClass> synth_plane_classes() {
  return {{synth_labels::kFloor, PlaneClass::kFloor},
          {synth_labels::kCeiling, PlaneClass::kCeiling},
          {synth_labels::kWall, PlaneClass::kWall},
          {synth_labels::kObject, PlaneClass::kOther},
          {synth_labels::kReflective, PlaneClass::kOther}};
}

CameraIntrinsics SynthSceneSpec::intrinsics() const {
  const double f = focal_scale * width;
  return {f, f, (width - 1) / 2.0, (height - 1) / 2.0};
}

SynthRender render_scene(const SynthSceneSpec& spec, std::uint64_t seed) {
  validate(spec);
  const auto k = spec.intrinsics();
  const auto cam = camera_frame(spec);
  const Vec3 c = spec.camera_position;
  const Vec3 down = scale(cam.up, -1.0);
  const int h = spec.height, w = spec.width;

  DepthMap depth(h, w);
  NormalMap normals(h, w);
  Grid<std::int32_t> labels(h, w, 1);
  Grid<std::int32_t> face_id(h, w, 1, -1);
  std::vector<float> rgb(static_cast<std::size_t>(h) * w * 3);
  Rng noise(derive_seed(seed, {spec.texture_seed, 0x6e6f697365}));

  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      const double xn = (u - k.cx) / k.fx;
      const double yn = (v - k.cy) / k.fy;
      // Camera-frame direction (xn, yn, 1) so the ray parameter equals depth.
      const Vec3 dir = add(add(scale(cam.right, xn), scale(down, yn)), cam.forward);

      double best_t = std::numeric_limits<double>::infinity();
      int best_face = -1;
      Vec3 best_normal;
      // Room faces: 0/1 = x walls, 2/3 = y walls, 4 = floor, 5 = ceiling.
      for (int axis = 0; axis < 3; ++axis) {
        const double d = comp(dir, axis);
        if (d == 0.0) continue;
        const bool toward_max = d > 0;
        const double plane = toward_max ? comp(spec.room_size, axis) : 0.0;
        const double t = (plane - comp(c, axis)) / d;
        if (t > 0 && t < best_t) {
          best_t = t;
          best_face = axis == 2 ? (toward_max ? 5 : 4) : axis * 2 + (toward_max ? 1 : 0);
          best_normal = axis_vec(axis, toward_max ? -1.0 : 1.0);
        }
      }
      for (std::size_t bi = 0; bi < spec.boxes.size(); ++bi) {
        const auto& b = spec.boxes[bi];
        double t_enter = -std::numeric_limits<double>::infinity();
        double t_exit = std::numeric_limits<double>::infinity();
        int enter_axis = -1;
        bool enter_from_min = true;
        bool miss = false;
        for (int axis = 0; axis < 3 && !miss; ++axis) {
          const double d = comp(dir, axis);
          const double o = comp(c, axis);
          const double lo = comp(b.min, axis), hi = comp(b.max, axis);
          if (d == 0.0) {
            if (o <= lo || o >= hi) miss = true;
            continue;
          }
          double t0 = (lo - o) / d, t1 = (hi - o) / d;
          bool from_min = true;
          if (t0 > t1) {
            std::swap(t0, t1);
            from_min = false;
          }
          if (t0 > t_enter) {
            t_enter = t0;
            enter_axis = axis;
            enter_from_min = from_min;
          }
          t_exit = std::min(t_exit, t1);
        }
        if (miss || enter_axis < 0 || !(t_enter < t_exit) || !(t_enter > 0) || t_enter >= best_t) continue;
        best_t = t_enter;
        best_face = 6 + static_cast<int>(bi) * 6 + enter_axis * 2 + (enter_from_min ? 0 : 1);
        best_normal = axis_vec(enter_axis, enter_from_min ? -1.0 : 1.0);
      }
      if (best_face < 0) throw ParameterError("synth_scene: ray escaped the room");

      depth.at(v, u) = static_cast<float>(best_t);
      normals.set(v, u, {static_cast<float>(dot(best_normal, cam.right)),
                         static_cast<float>(dot(best_normal, cam.forward)),
                         static_cast<float>(dot(best_normal, cam.up))});
      face_id.at(v, u) = best_face;
      if (best_face >= 6) {
        labels.at(v, u) = spec.boxes[static_cast<std::size_t>((best_face - 6) / 6)].reflective
                              ? synth_labels::kReflective
                              : synth_labels::kObject;
      } else if (best_face == 4) {
        labels.at(v, u) = synth_labels::kFloor;
      } else if (best_face == 5) {
        labels.at(v, u) = synth_labels::kCeiling;
      } else {
        labels.at(v, u) = synth_labels::kWall;
      }

      const auto base = face_color(best_face, spec);
      bool lamp = false;
      if (best_face == 5 && spec.ceiling_lamp) {
        const Vec3 p = add(c, scale(dir, best_t));
        lamp = std::abs(p.x - spec.room_size.x / 2) < 0.3 && std::abs(p.y - spec.room_size.y / 2) < 0.3;
      }
      for (int ch = 0; ch < 3; ++ch) {
        const double n = noise.uniform(-1.0, 1.0) * spec.texture_noise;
        rgb[(static_cast<std::size_t>(v) * w + u) * 3 + ch] = lamp ? 1.0f : quantize8(base[ch] * (1.0 + n));
      }
    }
  }

  SynthRender out;
  out.sample.id = spec.id;
  out.sample.rgb = RgbImage(h, w, std::move(rgb));
  out.sample.gt_depth = depth;
  out.sample.raw_depth = std::move(depth);
  out.sample.seg = SegMask(std::move(labels), synth_plane_classes());
  out.sample.intrinsics = k;
  out.sample.gt_normals = std::move(normals);
  out.face_id = std::move(face_id);
  return out;
}

SampleRecord synth_scene(const SynthSceneSpec& spec, std::uint64_t seed) { return render_scene(spec, seed).sample; }

SynthSceneSpec random_scene_spec(std::uint64_t seed, int width, int height) {
  Rng rng(derive_seed(seed, {0x7363656e65}));
  SynthSceneSpec s;
  s.width = width;
  s.height = height;
  s.room_size = {rng.uniform(3.5, 6.0), rng.uniform(3.5, 6.0), rng.uniform(2.5, 3.2)};
  s.camera_position = {rng.uniform(0.3, 0.7) * s.room_size.x, rng.uniform(0.3, 0.7) * s.room_size.y,
                       rng.uniform(1.2, 1.6)};
  s.yaw = rng.uniform(0.0, 6.283185307179586);
  s.texture_seed = rng.next();
  s.id = "synth_" + std::to_string(seed);

  const int n_boxes = 1 + static_cast<int>(rng.below(3));
  for (int attempt = 0; attempt < 50 && static_cast<int>(s.boxes.size()) < n_boxes; ++attempt) {
    SynthBox b;
    const double sx = rng.uniform(0.4, 1.2), sy = rng.uniform(0.4, 1.2), sz = rng.uniform(0.4, 1.8);
    b.min = {rng.uniform(0.05, s.room_size.x - sx - 0.05), rng.uniform(0.05, s.room_size.y - sy - 0.05), 0.0};
    b.max = {b.min.x + sx, b.min.y + sy, sz};
    // Keep a clearance around the camera.
    const auto& c = s.camera_position;
    if (c.x > b.min.x - 0.4 && c.x < b.max.x + 0.4 && c.y > b.min.y - 0.4 && c.y < b.max.y + 0.4) continue;
    const double kind = rng.uniform();
    if (kind < 0.3) {
      b.color = {0.01f, 0.01f, 0.012f};  // dark matte surface
    } else {
      b.color = {static_cast<float>(rng.uniform(0.1, 0.9)), static_cast<float>(rng.uniform(0.1, 0.9)),
                 static_cast<float>(rng.uniform(0.1, 0.9))};
      b.reflective = kind > 0.7;
    }
    s.boxes.push_back(b);
  }
  return s;
}

std::vector<std::array<double, 4>> scene_planes_camera(const SynthSceneSpec& spec) {
  const auto cam = camera_frame(spec);
  const Vec3 down = scale(cam.up, -1.0);
  const Vec3 c = spec.camera_position;
  std::vector<std::array<double, 4>> planes;
  auto push = [&](const Vec3& n, double offset) {
    // World plane n.X = offset, X = c + R p  ->  (R^T n).p = offset - n.c
    planes.push_back({dot(n, cam.right), dot(n, down), dot(n, cam.forward), offset - dot(n, c)});
  };
  for (int axis = 0; axis < 3; ++axis) {
    push(axis_vec(axis, 1.0), 0.0);
    push(axis_vec(axis, 1.0), comp(spec.room_size, axis));
  }
  for (const auto& b : spec.boxes) {
    for (int axis = 0; axis < 3; ++axis) {
      push(axis_vec(axis, 1.0), comp(b.min, axis));
      push(axis_vec(axis, 1.0), comp(b.max, axis));
    }
  }
  return planes;
}

}  // namespace rdfc::data
