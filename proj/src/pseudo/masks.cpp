#include "rdfc/pseudo/masks.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include <opencv2/ximgproc/segmentation.hpp>

#include "rdfc/core/random.hpp"

namespace rdfc::pseudo {

namespace {

void require_same_shape(const Mask& a, const Mask& b) {
  if (!a.same_shape(b)) throw ParameterError("mask shapes differ");
}

}  // namespace

std::pair<Grid<std::int32_t>, int> connected_components(const Mask& m) {
  const int h = m.height(), w = m.width();
  Grid<std::int32_t> labels(h, w, 1, -1);
  int count = 0;
  std::vector<std::pair<int, int>> stack;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (!m.at(r, c) || labels.at(r, c) >= 0) continue;
      labels.at(r, c) = count;
      stack.assign(1, {r, c});
      while (!stack.empty()) {
        auto [pr, pc] = stack.back();
        stack.pop_back();
        for (int dr = -1; dr <= 1; ++dr) {
          for (int dc = -1; dc <= 1; ++dc) {
            const int rr = pr + dr, cc = pc + dc;
            if (rr < 0 || rr >= h || cc < 0 || cc >= w) continue;
            if (!m.at(rr, cc) || labels.at(rr, cc) >= 0) continue;
            labels.at(rr, cc) = count;
            stack.emplace_back(rr, cc);
          }
        }
      }
      ++count;
    }
  }
  return {std::move(labels), count};
}

Mask erode(const Mask& m) {
  const int h = m.height(), w = m.width();
  Mask out(h, w, 1);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (!m.at(r, c)) continue;
      bool interior = true;
      for (int dr = -1; dr <= 1 && interior; ++dr) {
        for (int dc = -1; dc <= 1 && interior; ++dc) {
          const int rr = r + dr, cc = c + dc;
          interior = rr >= 0 && rr < h && cc >= 0 && cc < w && m.at(rr, cc);
        }
      }
      out.at(r, c) = interior ? 1 : 0;
    }
  }
  return out;
}

Mask dilate(const Mask& m, int radius) {
  const int h = m.height(), w = m.width();
  Mask out(h, w, 1);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (!m.at(r, c)) continue;
      for (int rr = std::max(0, r - radius); rr <= std::min(h - 1, r + radius); ++rr) {
        for (int cc = std::max(0, c - radius); cc <= std::min(w - 1, c + radius); ++cc) out.at(rr, cc) = 1;
      }
    }
  }
  return out;
}

Mask mask_union(const Mask& a, const Mask& b) {
  require_same_shape(a, b);
  Mask out(a.height(), a.width(), 1);
  auto da = a.data(), db = b.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = (da[i] || db[i]) ? 1 : 0;
  return out;
}

Mask highlight_mask(const RgbImage& rgb, const HighlightParams& p) {
  const int h = rgb.height(), w = rgb.width();
  Mask bright(h, w, 1);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const float lum = std::max({rgb.at(r, c, 0), rgb.at(r, c, 1), rgb.at(r, c, 2)});
      bright.at(r, c) = lum > p.threshold ? 1 : 0;
    }
  }
  auto [labels, n] = connected_components(bright);
  std::vector<int> sizes(static_cast<std::size_t>(n), 0);
  for (auto l : labels.data()) {
    if (l >= 0) ++sizes[static_cast<std::size_t>(l)];
  }
  Mask kept(h, w, 1);
  auto src = labels.data();
  auto dst = kept.data();
  for (std::size_t i = 0; i < src.size(); ++i) {
    dst[i] = (src[i] >= 0 && sizes[static_cast<std::size_t>(src[i])] >= p.min_component) ? 1 : 0;
  }
  return dilate(kept, p.dilation);
}

Mask black_mask(const RgbImage& rgb) {
  // Values are multiples of 1/255 once quantized; the tolerance absorbs
  // float rounding of k/255.
  constexpr float kBound = 5.0f / 255.0f + 1e-6f;
  Mask out(rgb.height(), rgb.width(), 1);
  for (int r = 0; r < rgb.height(); ++r) {
    for (int c = 0; c < rgb.width(); ++c) {
      out.at(r, c) = (rgb.at(r, c, 0) <= kBound && rgb.at(r, c, 1) <= kBound && rgb.at(r, c, 2) <= kBound) ? 1 : 0;
    }
  }
  return out;
}

Grid<std::int32_t> graph_segments(const RgbImage& rgb, const GraphSegParams& p) {
  cv::Mat img(rgb.height(), rgb.width(), CV_8UC3);
  for (int r = 0; r < img.rows; ++r) {
    auto* row = img.ptr<cv::Vec3b>(r);
    for (int c = 0; c < img.cols; ++c) {
      for (int ch = 0; ch < 3; ++ch) {
        row[c][ch] = static_cast<std::uint8_t>(std::lround(std::clamp(rgb.at(r, c, ch), 0.0f, 1.0f) * 255.0f));
      }
    }
  }
  auto seg = cv::ximgproc::segmentation::createGraphSegmentation(p.sigma, static_cast<float>(p.k), p.min_size);
  cv::Mat labels;
  seg->processImage(img, labels);
  Grid<std::int32_t> out(rgb.height(), rgb.width(), 1);
  for (int r = 0; r < labels.rows; ++r) {
    const auto* row = labels.ptr<std::int32_t>(r);
    for (int c = 0; c < labels.cols; ++c) out.at(r, c) = row[c];
  }
  return out;
}

Mask graph_seg_mask(const RgbImage& rgb, std::uint64_t seed, const GraphSegParams& p) {
  Mask out(rgb.height(), rgb.width(), 1);
  if (p.select_probability <= 0.0 || out.empty()) return out;
  const auto segments = graph_segments(rgb, p);
  std::map<std::int32_t, std::size_t> area;
  for (auto l : segments.data()) ++area[l];
  const double small = p.small_area_fraction * static_cast<double>(out.pixel_count());

  Rng rng(derive_seed(seed, {0x6772617068}));
  std::map<std::int32_t, bool> selected;
  for (const auto& [label, n] : area) {
    // One draw per segment in label order keeps the result seed-stable.
    const bool pick = rng.bernoulli(p.select_probability);
    selected[label] = pick && static_cast<double>(n) < small;
  }
  auto src = segments.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = selected[src[i]] ? 1 : 0;
  return out;
}

Mask semantic_mask(const SegMask& seg, const std::set<std::int32_t>& candidate_labels, std::uint64_t seed,
                   int max_instances) {
  const int h = seg.height(), w = seg.width();
  Mask candidates(h, w, 1);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) candidates.at(r, c) = candidate_labels.contains(seg.label(r, c)) ? 1 : 0;
  }
  // Instances: connected pixels sharing the same candidate label.
  Grid<std::int32_t> instance(h, w, 1, -1);
  int n_instances = 0;
  for (auto label : candidate_labels) {
    Mask one(h, w, 1);
    bool any = false;
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        if (seg.label(r, c) == label) {
          one.at(r, c) = 1;
          any = true;
        }
      }
    }
    if (!any) continue;
    auto [cc, n] = connected_components(one);
    auto src = cc.data();
    auto dst = instance.data();
    for (std::size_t i = 0; i < src.size(); ++i) {
      if (src[i] >= 0) dst[i] = n_instances + src[i];
    }
    n_instances += n;
  }

  Mask out(h, w, 1);
  if (n_instances == 0 || max_instances < 1) return out;
  Rng rng(derive_seed(seed, {0x73656d616e746963}));
  const int wanted = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_instances)));
  const int take = std::min(wanted, n_instances);
  std::vector<int> order(static_cast<std::size_t>(n_instances));
  for (int i = 0; i < n_instances; ++i) order[static_cast<std::size_t>(i)] = i;
  for (int i = 0; i < take; ++i) {
    const auto j = static_cast<std::size_t>(i) + rng.below(static_cast<std::uint64_t>(n_instances - i));
    std::swap(order[static_cast<std::size_t>(i)], order[j]);
  }
  for (int i = 0; i < take; ++i) {
    const int chosen = order[static_cast<std::size_t>(i)];
    Mask inst(h, w, 1);
    auto src = instance.data();
    auto dst = inst.data();
    for (std::size_t k = 0; k < src.size(); ++k) dst[k] = src[k] == chosen ? 1 : 0;
    out = mask_union(out, erode(inst));
  }
  return out;
}

Mask semantic_xor_mask(const SegMask& seg_pred, const SegMask& seg_gt) {
  if (seg_pred.height() != seg_gt.height() || seg_pred.width() != seg_gt.width()) {
    throw ParameterError("semantic_xor_mask: segmentation shapes differ");
  }
  Mask out(seg_gt.height(), seg_gt.width(), 1);
  for (int r = 0; r < out.height(); ++r) {
    for (int c = 0; c < out.width(); ++c) out.at(r, c) = seg_pred.label(r, c) != seg_gt.label(r, c) ? 1 : 0;
  }
  return out;
}

SegMask noisy_segmentation(const SegMask& gt, std::uint64_t seed, int band, double flip_probability) {
  const int h = gt.height(), w = gt.width();
  Grid<std::int32_t> labels = gt.labels();
  Rng rng(derive_seed(seed, {0x7365676e6f697365}));
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const auto own = gt.label(r, c);
      std::int32_t other = own;
      for (int dr = -band; dr <= band && other == own; ++dr) {
        for (int dc = -band; dc <= band && other == own; ++dc) {
          const int rr = r + dr, cc = c + dc;
          if (rr >= 0 && rr < h && cc >= 0 && cc < w) other = gt.label(rr, cc);
        }
      }
      const bool flip = rng.bernoulli(flip_probability);
      if (other != own && flip) labels.at(r, c) = other;
    }
  }
  return SegMask(std::move(labels), gt.classes());
}

}  // namespace rdfc::pseudo
