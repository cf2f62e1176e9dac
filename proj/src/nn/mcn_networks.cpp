#include "rdfc/mcn/networks.hpp"

namespace rdfc::mcn {

namespace F = torch::nn::functional;

namespace {

torch::nn::Sequential double_conv(int64_t in, int64_t out) {
  return torch::nn::Sequential(torch::nn::Conv2d(torch::nn::Conv2dOptions(in, out, 3).padding(1).bias(false)),
                               torch::nn::BatchNorm2d(out), torch::nn::ReLU(),
                               torch::nn::Conv2d(torch::nn::Conv2dOptions(out, out, 3).padding(1).bias(false)),
                               torch::nn::BatchNorm2d(out), torch::nn::ReLU());
}

torch::Tensor up2(const torch::Tensor& x) {
  return F::interpolate(x, F::InterpolateFuncOptions().scale_factor(std::vector<double>{2.0, 2.0}).mode(torch::kNearest));
}

}  // namespace

NormalGeneratorImpl::NormalGeneratorImpl(NormalInput in, int64_t b) : input(in) {
  const int64_t in_channels = in == NormalInput::kRgbd ? 4 : 3;
  enc1 = register_module("enc1", double_conv(in_channels, b));
  enc2 = register_module("enc2", double_conv(b, 2 * b));
  enc3 = register_module("enc3", double_conv(2 * b, 4 * b));
  bottleneck = register_module("bottleneck", double_conv(4 * b, 8 * b));
  dec3 = register_module("dec3", double_conv(8 * b + 4 * b, 4 * b));
  dec2 = register_module("dec2", double_conv(4 * b + 2 * b, 2 * b));
  dec1 = register_module("dec1", double_conv(2 * b + b, b));
  out = register_module("out", torch::nn::Conv2d(torch::nn::Conv2dOptions(b, 3, 1)));
}

torch::Tensor NormalGeneratorImpl::forward(const torch::Tensor& rgb, const torch::Tensor& depth) {
  const int64_t h = rgb.size(2), w = rgb.size(3);
  auto x = input == NormalInput::kRgbd ? torch::cat({rgb, depth}, 1) : rgb;
  x = nn::pad_to_multiple(x, 8);
  auto e1 = enc1->forward(x);
  auto e2 = enc2->forward(F::max_pool2d(e1, F::MaxPool2dFuncOptions(2)));
  auto e3 = enc3->forward(F::max_pool2d(e2, F::MaxPool2dFuncOptions(2)));
  auto bn = bottleneck->forward(F::max_pool2d(e3, F::MaxPool2dFuncOptions(2)));
  auto d3 = dec3->forward(torch::cat({up2(bn), e3}, 1));
  auto d2 = dec2->forward(torch::cat({up2(d3), e2}, 1));
  auto d1 = dec1->forward(torch::cat({up2(d2), e1}, 1));
  auto n = nn::crop_to(out(d1), h, w);
  return F::normalize(n, F::NormalizeFuncOptions().p(2).dim(1).eps(1e-12));
}

McnNetImpl::McnNetImpl(int64_t base_channels, double scale) : depth_scale(scale) {
  net = register_module("net", nn::EncoderDecoder(4, 2, base_channels));
}

McnOutput McnNetImpl::forward(const torch::Tensor& d_raw, const torch::Tensor& normals) {
  auto x = torch::cat({d_raw / depth_scale, normals}, 1);
  auto res = net->forward(x);
  McnOutput out;
  out.d_l = depth_scale * F::softplus(res.output.narrow(1, 0, 1));
  out.c_l = res.output.narrow(1, 1, 1);
  out.latents = std::move(res.stages);
  return out;
}

}  // namespace rdfc::mcn
