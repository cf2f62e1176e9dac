#include "rdfc/gan/networks.hpp"

#include "rdfc/core/grid.hpp"

namespace rdfc::gan {

namespace F = torch::nn::functional;

DepthGeneratorImpl::DepthGeneratorImpl(int64_t base_channels, double scale, int64_t attention_reduction)
    : depth_scale(scale) {
  net = register_module("net", nn::EncoderDecoder(3, 2, base_channels));
  for (int s = 0; s < nn::kFusionStages; ++s) {
    fusers.push_back(register_module("wadain" + std::to_string(s), fusion::WAdaIN(net->stage_channels(s), attention_reduction)));
  }
}

GanOutput DepthGeneratorImpl::forward(const torch::Tensor& rgb, const std::vector<torch::Tensor>& latents) {
  if (latents.size() != static_cast<std::size_t>(nn::kFusionStages)) {
    throw ParameterError("generator G: expected " + std::to_string(nn::kFusionStages) + " latents, got " +
                         std::to_string(latents.size()));
  }
  auto hook = [&](int stage, const torch::Tensor& f) {
    const auto& z = latents[static_cast<std::size_t>(stage)];
    if (z.sizes() != f.sizes()) {
      throw ParameterError("generator G: latent " + std::to_string(stage) + " has shape " + c10::str(z.sizes()) +
                           " but the decoder stage is " + c10::str(f.sizes()));
    }
    return fusers[static_cast<std::size_t>(stage)]->forward(z, f);
  };
  auto res = net->forward(rgb, hook);
  return {depth_scale * F::softplus(res.output.narrow(1, 0, 1)), res.output.narrow(1, 1, 1)};
}

RgbGeneratorImpl::RgbGeneratorImpl(int64_t base_channels, double scale) : depth_scale(scale) {
  net = register_module("net", nn::EncoderDecoder(1, 3, base_channels));
}

torch::Tensor RgbGeneratorImpl::forward(const torch::Tensor& depth) {
  return torch::sigmoid(net->forward(depth / depth_scale).output);
}

PatchCriticImpl::PatchCriticImpl(int64_t in_channels, int64_t b) {
  auto block = [](int64_t in, int64_t out) {
    return torch::nn::Conv2d(torch::nn::Conv2dOptions(in, out, 4).stride(2).padding(1));
  };
  auto lrelu = [] { return torch::nn::LeakyReLU(torch::nn::LeakyReLUOptions().negative_slope(0.2)); };
  body = register_module(
      "body", torch::nn::Sequential(block(in_channels, b), lrelu(), block(b, 2 * b), lrelu(), block(2 * b, 4 * b),
                                    lrelu(), torch::nn::Conv2d(torch::nn::Conv2dOptions(4 * b, 1, 3).padding(1))));
}

torch::Tensor PatchCriticImpl::forward(const torch::Tensor& x) { return body->forward(x); }

DepthCriticImpl::DepthCriticImpl(int64_t base_channels, double scale) : depth_scale(scale) {
  critic = register_module("critic", PatchCritic(4, base_channels));
}

torch::Tensor DepthCriticImpl::forward(const torch::Tensor& depth, const torch::Tensor& cond_rgb) {
  return critic->forward(torch::cat({depth / depth_scale, cond_rgb}, 1));
}

RgbCriticImpl::RgbCriticImpl(int64_t base_channels) {
  critic = register_module("critic", PatchCritic(3, base_channels));
}

torch::Tensor RgbCriticImpl::forward(const torch::Tensor& rgb) { return critic->forward(rgb); }

}  // namespace rdfc::gan
