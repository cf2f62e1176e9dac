#pragma once

#include <vector>

#include <torch/torch.h>

#include "rdfc/nn/blocks.hpp"

namespace rdfc::mcn {

enum class NormalInput { kRgbd, kRgb };

/// Small U-Net (three downsampling levels) producing per-pixel unit normals.
/// Input is rgb [B,3,H,W] plus, for kRgbd, normalized depth [B,1,H,W].
struct NormalGeneratorImpl : torch::nn::Module {
  NormalGeneratorImpl(NormalInput input, int64_t base_channels);
  torch::Tensor forward(const torch::Tensor& rgb, const torch::Tensor& depth);

  NormalInput input;
  torch::nn::Sequential enc1{nullptr}, enc2{nullptr}, enc3{nullptr}, bottleneck{nullptr};
  torch::nn::Sequential dec3{nullptr}, dec2{nullptr}, dec1{nullptr};
  torch::nn::Conv2d out{nullptr};
};
TORCH_MODULE(NormalGenerator);

struct McnOutput {
  torch::Tensor d_l;                   // [B,1,H,W] meters, >= 0
  torch::Tensor c_l;                   // [B,1,H,W] logits
  std::vector<torch::Tensor> latents;  // deepest first; latents[0] is z
};

/// Depth encoder-decoder on concat(normalized raw depth, normals).
/// d_l = depth_scale * softplus(head_0); c_l = head_1.
struct McnNetImpl : torch::nn::Module {
  McnNetImpl(int64_t base_channels, double depth_scale);
  McnOutput forward(const torch::Tensor& d_raw, const torch::Tensor& normals);

  nn::EncoderDecoder net{nullptr};
  double depth_scale;
};
TORCH_MODULE(McnNet);

}  // namespace rdfc::mcn
