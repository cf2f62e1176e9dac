#pragma once

#include <torch/torch.h>

#include "rdfc/core/types.hpp"

namespace rdfc::fusion {

/// ε in the denominator of the content standard deviation.
inline constexpr double kContentEps = 1e-5;

/// Spatial self-attention collapsed to one channel: 1x1 projections to
/// query/key (C/reduction channels, at least 1) and value (1 channel), a row
/// softmax over the h*w positions of the scaled query-key products, and the
/// attended value map. [B, C, h, w] -> [B, 1, h, w].
struct AttentionMapImpl : torch::nn::Module {
  explicit AttentionMapImpl(int64_t channels, int64_t reduction = 8);
  torch::Tensor forward(const torch::Tensor& x);

  torch::nn::Conv2d query{nullptr}, key{nullptr}, value{nullptr};
  int64_t reduced;
};
TORCH_MODULE(AttentionMap);

/// Per-channel spatial mean and population standard deviation of
/// [B, C, h, w], each shaped [B, C, 1, 1].
std::pair<torch::Tensor, torch::Tensor> channel_stats(const torch::Tensor& x);

/// The W-AdaIN combination given precomputed attention maps:
///   out = sigma(z) * (f - mu(f)) / (sigma(f) + eps) * attn_z + mu(z) * attn_f
/// `attn_z` / `attn_f` are [B, 1, h, w] and broadcast over channels.
torch::Tensor wadain_combine(const torch::Tensor& z, const torch::Tensor& f_r, const torch::Tensor& attn_z,
                             const torch::Tensor& attn_f);

/// Classic AdaIN: sigma(z) * normalize(f) + mu(z).
torch::Tensor adain(const torch::Tensor& z, const torch::Tensor& f_r);

/// Weighted adaptive instance normalization of RGB features `f_r` (content)
/// by depth features `z` (style), with one attention map per input.
struct WAdaINImpl : torch::nn::Module {
  explicit WAdaINImpl(int64_t channels, int64_t reduction = 8);
  /// Throws ParameterError if z and f_r differ in shape.
  torch::Tensor forward(const torch::Tensor& z, const torch::Tensor& f_r);

  AttentionMap attn_z{nullptr}, attn_f{nullptr};
};
TORCH_MODULE(WAdaIN);

/// Per-pixel confidence-weighted blend of the two branch depths, computed
/// as a max-shifted softmax over (c_l, c_f).
torch::Tensor confidence_fuse(const torch::Tensor& d_l, const torch::Tensor& c_l, const torch::Tensor& d_f,
                              const torch::Tensor& c_f);

/// Same blend on in-memory maps, evaluated in double precision.
DepthMap confidence_fuse(const DepthMap& d_l, const ConfidenceMap& c_l, const DepthMap& d_f, const ConfidenceMap& c_f);

}  // namespace rdfc::fusion
