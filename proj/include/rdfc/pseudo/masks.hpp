#pragma once

#include <cstdint>
#include <set>

#include "rdfc/core/types.hpp"

namespace rdfc::pseudo {

struct HighlightParams {
  float threshold = 0.95f;  // on max(R,G,B), strict
  int min_component = 4;    // 8-connected pixels
  int dilation = 2;         // square (Chebyshev) radius
};

struct GraphSegParams {
  double k = 100.0;
  double sigma = 0.8;
  int min_size = 20;
  double small_area_fraction = 0.01;  // segments below this share of the image are candidates
  double select_probability = 0.3;
};

/// Specular highlights: bright components of at least `min_component`
/// pixels, dilated.
Mask highlight_mask(const RgbImage& rgb, const HighlightParams& p = {});

/// Pixels whose three channels are all within the 8-bit range [0, 5].
Mask black_mask(const RgbImage& rgb);

/// Felzenszwalb-Huttenlocher segmentation; each small segment is masked
/// independently with `select_probability`.
Mask graph_seg_mask(const RgbImage& rgb, std::uint64_t seed, const GraphSegParams& p = {});

/// Raw segment labels from the graph segmentation (exposed for tests).
Grid<std::int32_t> graph_segments(const RgbImage& rgb, const GraphSegParams& p = {});

/// Masks the eroded interiors of one or two (seeded) connected instances
/// whose label is a candidate. A single available instance is always taken.
Mask semantic_mask(const SegMask& seg, const std::set<std::int32_t>& candidate_labels, std::uint64_t seed,
                   int max_instances = 2);

/// Set where the predicted and ground-truth labels disagree.
/// Throws ParameterError on a shape mismatch.
Mask semantic_xor_mask(const SegMask& seg_pred, const SegMask& seg_gt);

/// 8-connected components of the set pixels; returns one label per pixel
/// (-1 for unset) and the component count.
std::pair<Grid<std::int32_t>, int> connected_components(const Mask& m);

/// Pixels of `m` whose full 3x3 neighborhood is inside `m` (outside the
/// image counts as unset).
Mask erode(const Mask& m);

/// Square dilation with the given radius.
Mask dilate(const Mask& m, int radius);

Mask mask_union(const Mask& a, const Mask& b);

/// Stand-in segmenter: the ground truth with seeded label flips in a band
/// of `band` pixels around label boundaries.
SegMask noisy_segmentation(const SegMask& gt, std::uint64_t seed, int band = 2, double flip_probability = 0.5);

}  // namespace rdfc::pseudo
