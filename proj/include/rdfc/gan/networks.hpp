#pragma once

#include <vector>

#include <torch/torch.h>

#include "rdfc/fusion/wadain.hpp"
#include "rdfc/nn/blocks.hpp"

namespace rdfc::gan {

struct GanOutput {
  torch::Tensor d_f;  // [B,1,H,W] meters, >= 0
  torch::Tensor c_f;  // [B,1,H,W] logits
};

/// Depth generator G: an rgb-only encoder-decoder whose decoder stages are
/// replaced by W-AdaIN(latent, stage) wherever an MCN latent is supplied.
struct DepthGeneratorImpl : torch::nn::Module {
  DepthGeneratorImpl(int64_t base_channels, double depth_scale, int64_t attention_reduction = 8);

  /// `latents` holds nn::kFusionStages features, deepest first, matching
  /// the decoder stage shapes. Throws ParameterError on a mismatch.
  GanOutput forward(const torch::Tensor& rgb, const std::vector<torch::Tensor>& latents);

  nn::EncoderDecoder net{nullptr};
  std::vector<fusion::WAdaIN> fusers;
  double depth_scale;
};
TORCH_MODULE(DepthGenerator);

/// Auxiliary generator G_r: depth -> rgb in [0, 1] (sigmoid output).
struct RgbGeneratorImpl : torch::nn::Module {
  RgbGeneratorImpl(int64_t base_channels, double depth_scale);
  torch::Tensor forward(const torch::Tensor& depth);

  nn::EncoderDecoder net{nullptr};
  double depth_scale;
};
TORCH_MODULE(RgbGenerator);

/// PatchGAN critic: three stride-2 4x4 conv blocks with leaky ReLU and a
/// final 3x3 conv to one score channel, no output nonlinearity. A 64x64
/// input yields an 8x8 score grid.
struct PatchCriticImpl : torch::nn::Module {
  PatchCriticImpl(int64_t in_channels, int64_t base_channels);
  torch::Tensor forward(const torch::Tensor& x);

  torch::nn::Sequential body{nullptr};
};
TORCH_MODULE(PatchCritic);

/// Conditional depth critic D(d | r): scores concat(d / depth_scale, r).
struct DepthCriticImpl : torch::nn::Module {
  DepthCriticImpl(int64_t base_channels, double depth_scale);
  torch::Tensor forward(const torch::Tensor& depth, const torch::Tensor& cond_rgb);

  PatchCritic critic{nullptr};
  double depth_scale;
};
TORCH_MODULE(DepthCritic);

/// Unconditional rgb critic D_r.
struct RgbCriticImpl : torch::nn::Module {
  explicit RgbCriticImpl(int64_t base_channels);
  torch::Tensor forward(const torch::Tensor& rgb);

  PatchCritic critic{nullptr};
};
TORCH_MODULE(RgbCritic);

}  // namespace rdfc::gan
