#include "rdfc/pseudo/pseudo_depth.hpp"

#include "rdfc/core/random.hpp"

namespace rdfc::pseudo {

std::string to_string(Method m) {
  switch (m) {
    case Method::kHighlight:
      return "highlight";
    case Method::kBlack:
      return "black";
    case Method::kGraphSeg:
      return "graphseg";
    case Method::kSemantic:
      return "semantic";
    case Method::kSemanticXor:
      return "semantic_xor";
  }
  return "unknown";
}

Mask MaskSet::combined() const {
  Mask out;
  for (std::size_t i = 0; i < masks.size(); ++i) {
    if (masks[i].empty()) continue;
    out = out.empty() ? masks[i] : mask_union(out, masks[i]);
  }
  return out;
}

std::array<bool, kMethodCount> draw_methods(std::uint64_t seed, double probability) {
  Rng rng(derive_seed(seed, {0x6d6574686f6473}));
  std::array<bool, kMethodCount> out{};
  for (auto& flag : out) flag = probability == 0.5 ? rng.coin() : rng.bernoulli(probability);
  return out;
}

std::pair<DepthMap, MaskSet> make_pseudo_depth(const SampleRecord& s, const SegMask* seg_pred, std::uint64_t seed,
                                               const PseudoConfig& config) {
  s.check_consistent();
  const int h = s.height(), w = s.width();
  MaskSet set;
  set.applied = draw_methods(seed, config.method_probability);
  for (int i = 0; i < kMethodCount; ++i) set.applied[i] = set.applied[i] && config.enabled[i];
  for (auto& m : set.masks) m = Mask(h, w, 1);

  auto method_seed = [&](Method m) { return derive_seed(seed, {0x6d61736b, static_cast<std::uint64_t>(m)}); };
  auto& masks = set.masks;
  if (set.was_applied(Method::kHighlight)) masks[0] = highlight_mask(s.rgb, config.highlight);
  if (set.was_applied(Method::kBlack)) masks[1] = black_mask(s.rgb);
  if (set.was_applied(Method::kGraphSeg)) masks[2] = graph_seg_mask(s.rgb, method_seed(Method::kGraphSeg), config.graph);
  if (s.seg) {
    if (set.was_applied(Method::kSemantic)) {
      masks[3] = semantic_mask(*s.seg, config.semantic_labels, method_seed(Method::kSemantic),
                               config.semantic_max_instances);
    }
    if (set.was_applied(Method::kSemanticXor)) {
      if (seg_pred) {
        masks[4] = semantic_xor_mask(*seg_pred, *s.seg);
      } else {
        masks[4] = semantic_xor_mask(
            noisy_segmentation(*s.seg, method_seed(Method::kSemanticXor), config.seg_noise_band, config.seg_noise_flip),
            *s.seg);
      }
    }
  }

  const Mask all = set.combined();
  DepthMap out = s.raw_depth;
  auto dst = out.data();
  auto m = all.data();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    if (m[i]) dst[i] = 0.0f;
  }
  return {std::move(out), std::move(set)};
}

}  // namespace rdfc::pseudo
