#pragma once

#include <array>
#include <cstdint>
#include <set>
#include <string>
#include <utility>

#include "rdfc/data/synth.hpp"
#include "rdfc/pseudo/masks.hpp"

namespace rdfc::pseudo {

enum class Method { kHighlight = 0, kBlack, kGraphSeg, kSemantic, kSemanticXor };
inline constexpr int kMethodCount = 5;
std::string to_string(Method m);

struct PseudoConfig {
  double method_probability = 0.5;
  HighlightParams highlight;
  GraphSegParams graph;
  std::set<std::int32_t> semantic_labels{data::synth_labels::kReflective};
  int semantic_max_instances = 2;
  int seg_noise_band = 2;
  double seg_noise_flip = 0.5;
  // A disabled method is never applied, whatever its draw.
  std::array<bool, kMethodCount> enabled{true, true, true, true, true};
};

/// The five method masks (left empty/all-false when not applied) and which
/// methods were drawn.
struct MaskSet {
  std::array<Mask, kMethodCount> masks;
  std::array<bool, kMethodCount> applied{};

  const Mask& operator[](Method m) const { return masks[static_cast<std::size_t>(m)]; }
  bool was_applied(Method m) const { return applied[static_cast<std::size_t>(m)]; }
  Mask combined() const;
};

/// Draws the per-method inclusion flags; each is an independent fair coin
/// (for the default probability) derived from `seed`.
std::array<bool, kMethodCount> draw_methods(std::uint64_t seed, double probability = 0.5);

/// Corrupts s.raw_depth by zeroing the union of the drawn masks. Methods
/// needing segmentation are skipped (empty mask) when s.seg is absent.
std::pair<DepthMap, MaskSet> make_pseudo_depth(const SampleRecord& s, const SegMask* seg_pred, std::uint64_t seed,
                                               const PseudoConfig& config = {});

}  // namespace rdfc::pseudo
