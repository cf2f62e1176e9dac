#pragma once

#include <functional>
#include <vector>

#include <torch/torch.h>

namespace rdfc::nn {

/// Number of decoder stages exposed for cross-branch fusion
/// (strides 32, 16, 8, 4).
inline constexpr int kFusionStages = 4;

/// Pads the bottom/right edges up to a multiple of `multiple` (reflection
/// when possible, replication otherwise).
torch::Tensor pad_to_multiple(const torch::Tensor& x, int64_t multiple);

/// Crops the bottom/right padding added by pad_to_multiple.
torch::Tensor crop_to(const torch::Tensor& x, int64_t height, int64_t width);

/// Draws conv / linear weights from N(0, std^2) and zeroes their biases.
void init_normal(torch::nn::Module& module, double std = 0.02);

struct BasicBlockImpl : torch::nn::Module {
  BasicBlockImpl(int64_t in_channels, int64_t out_channels, int64_t stride);
  torch::Tensor forward(const torch::Tensor& x);

  torch::nn::Conv2d conv1{nullptr}, conv2{nullptr};
  torch::nn::BatchNorm2d bn1{nullptr}, bn2{nullptr};
  torch::nn::Sequential downsample{nullptr};
};
TORCH_MODULE(BasicBlock);

/// Upsample x2, project, concatenate the skip, fuse.
struct UpBlockImpl : torch::nn::Module {
  UpBlockImpl(int64_t in_channels, int64_t skip_channels, int64_t out_channels);
  torch::Tensor forward(const torch::Tensor& x, const torch::Tensor& skip);

  torch::nn::Conv2d proj{nullptr}, fuse{nullptr};
  torch::nn::BatchNorm2d bn1{nullptr}, bn2{nullptr};
  int64_t skip_channels;
};
TORCH_MODULE(UpBlock);

/// Rewrites a decoder stage feature in place of the original; receives the
/// stage index (0 = deepest) and the feature.
using StageHook = std::function<torch::Tensor(int stage, const torch::Tensor& feature)>;

struct EncoderDecoderOutput {
  torch::Tensor output;                // [B, out_channels, H, W] (cropped)
  std::vector<torch::Tensor> stages;   // kFusionStages features, deepest first (padded grid)
};

/// ResNet-18-style encoder (stem + four stages of two basic blocks, total
/// stride 32, widths base..8*base) with an upsampling decoder and encoder
/// skips. The input is padded to a multiple of 32 and the output cropped back.
struct EncoderDecoderImpl : torch::nn::Module {
  EncoderDecoderImpl(int64_t in_channels, int64_t out_channels, int64_t base_channels);

  EncoderDecoderOutput forward(const torch::Tensor& x, const StageHook& hook = nullptr);

  /// Channel width of decoder stage `stage` (0 = deepest).
  int64_t stage_channels(int stage) const;

  int64_t base;
  torch::nn::Conv2d stem{nullptr};
  torch::nn::BatchNorm2d stem_bn{nullptr};
  torch::nn::Sequential layer1{nullptr}, layer2{nullptr}, layer3{nullptr}, layer4{nullptr};
  UpBlock up1{nullptr}, up2{nullptr}, up3{nullptr}, up4{nullptr}, up5{nullptr};
  torch::nn::Conv2d head{nullptr};
};
TORCH_MODULE(EncoderDecoder);

}  // namespace rdfc::nn
