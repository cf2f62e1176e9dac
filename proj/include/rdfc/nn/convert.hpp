#pragma once

#include <vector>

#include <torch/torch.h>

#include "rdfc/core/types.hpp"

namespace rdfc::nn {

// Image <-> tensor conversion. Tensors are float32 NCHW with batch 1;
// stack with torch::cat along dim 0.
torch::Tensor to_tensor(const DepthMap& d);
torch::Tensor to_tensor(const RgbImage& rgb);
torch::Tensor to_tensor(const NormalMap& n);
/// Plane class codes, [1, H, W] uint8.
torch::Tensor class_tensor(const SegMask& seg);
/// Binary mask, [1, 1, H, W] bool.
torch::Tensor to_tensor(const Mask& m);

/// Sample `index` of a [B,1,H,W] tensor; negatives are clamped to 0.
DepthMap depth_from_tensor(const torch::Tensor& t, int64_t index = 0);
ConfidenceMap confidence_from_tensor(const torch::Tensor& t, int64_t index = 0);
RgbImage rgb_from_tensor(const torch::Tensor& t, int64_t index = 0);
NormalMap normals_from_tensor(const torch::Tensor& t, int64_t index = 0);

}  // namespace rdfc::nn
