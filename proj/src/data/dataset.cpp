#include "rdfc/data/dataset.hpp"

#include <algorithm>
#include <set>

#include "rdfc/core/io.hpp"

namespace rdfc::data {

std::string to_string(Split s) { return s == Split::kTrain ? "train" : "test"; }

Split split_from_string(const std::string& s) {
  if (s == "train") return Split::kTrain;
  if (s == "test") return Split::kTest;
  throw ParameterError("unknown split '" + s + "' (expected train or test)");
}

namespace {

std::set<std::string> png_ids(const fs::path& dir) {
  std::set<std::string> ids;
  if (!fs::is_directory(dir)) return ids;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".png") ids.insert(e.path().stem().string());
  }
  return ids;
}

std::optional<fs::path> optional_file(const fs::path& dir, const std::string& id) {
  auto p = dir / (id + ".png");
  if (fs::exists(p)) return p;
  return std::nullopt;
}

}  // namespace

DatasetManifest load_dataset(const fs::path& root, Split split) {
  const fs::path split_dir = root / to_string(split);
  if (!fs::is_directory(root)) throw IoError("dataset root not found: " + root.string());

  DatasetManifest m;
  m.root = root;
  m.split = split;
  if (!fs::exists(split_dir)) return m;
  if (!fs::is_directory(split_dir)) throw IoError("split path is not a directory: " + split_dir.string());

  const auto rgb_ids = png_ids(split_dir / "rgb");
  const auto raw_ids = png_ids(split_dir / "raw_depth");
  for (const auto& id : rgb_ids) {
    if (!raw_ids.contains(id)) throw IoError("missing raw depth for sample: " + (split_dir / "rgb" / (id + ".png")).string());
  }
  for (const auto& id : raw_ids) {
    if (!rgb_ids.contains(id)) throw IoError("missing rgb for sample: " + (split_dir / "raw_depth" / (id + ".png")).string());
  }
  if (rgb_ids.empty()) return m;

  m.intrinsics = io::read_intrinsics(root / "intrinsics.txt");
  if (fs::exists(root / "plane_classes.txt")) m.plane_classes = io::read_plane_classes(root / "plane_classes.txt");

  for (const auto& id : rgb_ids) {
    ManifestEntry e;
    e.id = id;
    e.rgb = split_dir / "rgb" / (id + ".png");
    e.raw_depth = split_dir / "raw_depth" / (id + ".png");
    e.gt_depth = optional_file(split_dir / "gt_depth", id);
    e.seg = optional_file(split_dir / "seg", id);

    const auto rgb = io::read_rgb_png(e.rgb);
    auto check = [&](const fs::path& p, int h, int w) {
      if (h != rgb.height() || w != rgb.width()) {
        throw IoError("malformed file (size " + std::to_string(w) + "x" + std::to_string(h) +
                      " does not match rgb " + std::to_string(rgb.width()) + "x" +
                      std::to_string(rgb.height()) + "): " + p.string());
      }
    };
    const auto raw = io::read_depth_png(e.raw_depth);
    check(e.raw_depth, raw.height(), raw.width());
    if (e.gt_depth) {
      const auto gt = io::read_depth_png(*e.gt_depth);
      check(*e.gt_depth, gt.height(), gt.width());
    }
    if (e.seg) {
      const auto labels = io::read_label_png(*e.seg);
      check(*e.seg, labels.height(), labels.width());
      for (auto l : labels.data()) {
        if (!m.plane_classes.contains(l)) {
          throw IoError("malformed file (label " + std::to_string(l) + " missing from plane_classes.txt): " +
                        e.seg->string());
        }
      }
    }
    m.entries.push_back(std::move(e));
  }
  return m;
}

SampleRecord load_sample(const DatasetManifest& manifest, std::size_t index) {
  const auto& e = manifest.entries.at(index);
  SampleRecord s;
  s.id = e.id;
  s.rgb = io::read_rgb_png(e.rgb);
  s.raw_depth = io::read_depth_png(e.raw_depth);
  if (e.gt_depth) s.gt_depth = io::read_depth_png(*e.gt_depth);
  if (e.seg) s.seg = SegMask(io::read_label_png(*e.seg), manifest.plane_classes);
  s.intrinsics = manifest.intrinsics;
  s.check_consistent();
  return s;
}

void write_sample(const fs::path& root, Split split, const SampleRecord& sample) {
  sample.check_consistent();
  const fs::path dir = root / to_string(split);
  io::write_rgb_png(dir / "rgb" / (sample.id + ".png"), sample.rgb);
  io::write_depth_png(dir / "raw_depth" / (sample.id + ".png"), sample.raw_depth);
  if (sample.gt_depth) io::write_depth_png(dir / "gt_depth" / (sample.id + ".png"), *sample.gt_depth);
  if (sample.seg) {
    io::write_label_png(dir / "seg" / (sample.id + ".png"), sample.seg->labels());
    const auto classes_path = root / "plane_classes.txt";
    auto classes = fs::exists(classes_path) ? io::read_plane_classes(classes_path)
                                            : std::map<std::int32_t, PlaneClass>{};
    bool changed = false;
    for (const auto& [label, cls] : sample.seg->classes()) {
      auto [it, inserted] = classes.emplace(label, cls);
      if (!inserted && it->second != cls) {
        throw IoError("label " + std::to_string(label) + " conflicts with " + classes_path.string());
      }
      changed |= inserted;
    }
    if (changed) io::write_plane_classes(classes_path, classes);
  }
  const auto k_path = root / "intrinsics.txt";
  if (!fs::exists(k_path)) {
    io::write_intrinsics(k_path, sample.intrinsics);
  } else if (io::read_intrinsics(k_path) != sample.intrinsics) {
    throw IoError("sample '" + sample.id + "' intrinsics differ from " + k_path.string());
  }
}

}  // namespace rdfc::data
