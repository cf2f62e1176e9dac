#include "rdfc/core/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <opencv2/imgcodecs.hpp>

namespace rdfc::io {

namespace {

cv::Mat read_png(const fs::path& path, int flags) {
  if (!fs::exists(path)) throw IoError("file not found: " + path.string());
  cv::Mat m = cv::imread(path.string(), flags);
  if (m.empty()) throw IoError("cannot decode image: " + path.string());
  return m;
}

void write_png(const fs::path& path, const cv::Mat& m) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  bool ok = false;
  try {
    ok = cv::imwrite(path.string(), m);
  } catch (const cv::Exception& e) {
    throw IoError("cannot write image " + path.string() + ": " + e.what());
  }
  if (!ok) throw IoError("cannot write image: " + path.string());
}

}  // namespace

std::uint16_t encode_depth_mm(float meters) {
  if (!(meters > 0.0f)) return 0;
  const double mm = std::round(static_cast<double>(meters) * 1000.0);
  return static_cast<std::uint16_t>(std::clamp(mm, 1.0, 65535.0));
}

float decode_depth_mm(std::uint16_t mm) { return static_cast<float>(mm) / 1000.0f; }

DepthMap read_depth_png(const fs::path& path) {
  cv::Mat m = read_png(path, cv::IMREAD_ANYDEPTH | cv::IMREAD_GRAYSCALE);
  if (m.type() != CV_16UC1) throw IoError("depth PNG is not 16-bit single channel: " + path.string());
  DepthMap d(m.rows, m.cols);
  for (int r = 0; r < m.rows; ++r) {
    const auto* row = m.ptr<std::uint16_t>(r);
    for (int c = 0; c < m.cols; ++c) d.at(r, c) = decode_depth_mm(row[c]);
  }
  return d;
}

void write_depth_png(const fs::path& path, const DepthMap& depth) {
  cv::Mat m(depth.height(), depth.width(), CV_16UC1);
  for (int r = 0; r < m.rows; ++r) {
    auto* row = m.ptr<std::uint16_t>(r);
    for (int c = 0; c < m.cols; ++c) row[c] = encode_depth_mm(depth.at(r, c));
  }
  write_png(path, m);
}

RgbImage read_rgb_png(const fs::path& path) {
  cv::Mat m = read_png(path, cv::IMREAD_COLOR);
  RgbImage img(m.rows, m.cols);
  for (int r = 0; r < m.rows; ++r) {
    const auto* row = m.ptr<cv::Vec3b>(r);
    for (int c = 0; c < m.cols; ++c) {
      // OpenCV stores BGR.
      for (int ch = 0; ch < 3; ++ch) img.at(r, c, ch) = row[c][2 - ch] / 255.0f;
    }
  }
  return img;
}

void write_rgb_png(const fs::path& path, const RgbImage& rgb) {
  cv::Mat m(rgb.height(), rgb.width(), CV_8UC3);
  for (int r = 0; r < m.rows; ++r) {
    auto* row = m.ptr<cv::Vec3b>(r);
    for (int c = 0; c < m.cols; ++c) {
      for (int ch = 0; ch < 3; ++ch) {
        row[c][2 - ch] = static_cast<std::uint8_t>(std::lround(std::clamp(rgb.at(r, c, ch), 0.0f, 1.0f) * 255.0f));
      }
    }
  }
  write_png(path, m);
}

Grid<std::int32_t> read_label_png(const fs::path& path) {
  cv::Mat m = read_png(path, cv::IMREAD_GRAYSCALE);
  Grid<std::int32_t> labels(m.rows, m.cols, 1);
  for (int r = 0; r < m.rows; ++r) {
    const auto* row = m.ptr<std::uint8_t>(r);
    for (int c = 0; c < m.cols; ++c) labels.at(r, c) = row[c];
  }
  return labels;
}

void write_label_png(const fs::path& path, const Grid<std::int32_t>& labels) {
  cv::Mat m(labels.height(), labels.width(), CV_8UC1);
  for (int r = 0; r < m.rows; ++r) {
    auto* row = m.ptr<std::uint8_t>(r);
    for (int c = 0; c < m.cols; ++c) {
      const auto l = labels.at(r, c);
      if (l < 0 || l > 255) throw IoError("label out of 8-bit range writing " + path.string());
      row[c] = static_cast<std::uint8_t>(l);
    }
  }
  write_png(path, m);
}

std::map<std::int32_t, PlaneClass> read_plane_classes(const fs::path& path) {
  std::istringstream in(read_text(path));
  std::map<std::int32_t, PlaneClass> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    std::istringstream ls(line);
    std::int32_t label = 0;
    std::string name;
    if (!(ls >> label >> name)) {
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": expected 'label class_name'");
    }
    try {
      out[label] = plane_class_from_string(name);
    } catch (const ParameterError& e) {
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

void write_plane_classes(const fs::path& path, const std::map<std::int32_t, PlaneClass>& classes) {
  std::ostringstream out;
  for (const auto& [label, cls] : classes) out << label << ' ' << to_string(cls) << '\n';
  write_text(path, out.str());
}

CameraIntrinsics read_intrinsics(const fs::path& path) {
  std::istringstream in(read_text(path));
  std::array<double, 9> k{};
  for (auto& v : k) {
    if (!(in >> v)) throw IoError("intrinsics file needs 9 reals: " + path.string());
  }
  std::string extra;
  if (in >> extra) throw IoError("intrinsics file has trailing data: " + path.string());
  try {
    return CameraIntrinsics::from_matrix(k);
  } catch (const ParameterError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

void write_intrinsics(const fs::path& path, const CameraIntrinsics& k) {
  std::ostringstream out;
  out.precision(17);
  const auto m = k.matrix();
  for (int r = 0; r < 3; ++r) {
    out << m[r * 3] << ' ' << m[r * 3 + 1] << ' ' << m[r * 3 + 2] << '\n';
  }
  write_text(path, out.str());
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace rdfc::io
