#include "rdfc/nn/blocks.hpp"

namespace rdfc::nn {

namespace F = torch::nn::functional;

torch::Tensor pad_to_multiple(const torch::Tensor& x, int64_t multiple) {
  const int64_t h = x.size(-2), w = x.size(-1);
  const int64_t ph = (multiple - h % multiple) % multiple;
  const int64_t pw = (multiple - w % multiple) % multiple;
  if (ph == 0 && pw == 0) return x;
  auto opts = F::PadFuncOptions({0, pw, 0, ph});
  if (ph < h && pw < w) return F::pad(x, opts.mode(torch::kReflect));
  return F::pad(x, opts.mode(torch::kReplicate));
}

torch::Tensor crop_to(const torch::Tensor& x, int64_t height, int64_t width) {
  return x.index({torch::indexing::Slice(), torch::indexing::Slice(), torch::indexing::Slice(0, height),
                  torch::indexing::Slice(0, width)});
}

void init_normal(torch::nn::Module& module, double std) {
  torch::NoGradGuard no_grad;
  for (auto& m : module.modules(/*include_self=*/true)) {
    if (auto* conv = m->as<torch::nn::Conv2dImpl>()) {
      conv->weight.normal_(0.0, std);
      if (conv->bias.defined()) conv->bias.zero_();
    } else if (auto* linear = m->as<torch::nn::LinearImpl>()) {
      linear->weight.normal_(0.0, std);
      if (linear->bias.defined()) linear->bias.zero_();
    }
  }
}

namespace {

torch::nn::Conv2d conv3x3(int64_t in, int64_t out, int64_t stride = 1) {
  return torch::nn::Conv2d(torch::nn::Conv2dOptions(in, out, 3).stride(stride).padding(1).bias(false));
}

}  // namespace

BasicBlockImpl::BasicBlockImpl(int64_t in_channels, int64_t out_channels, int64_t stride) {
  conv1 = register_module("conv1", conv3x3(in_channels, out_channels, stride));
  bn1 = register_module("bn1", torch::nn::BatchNorm2d(out_channels));
  conv2 = register_module("conv2", conv3x3(out_channels, out_channels));
  bn2 = register_module("bn2", torch::nn::BatchNorm2d(out_channels));
  if (stride != 1 || in_channels != out_channels) {
    downsample = register_module(
        "downsample",
        torch::nn::Sequential(
            torch::nn::Conv2d(torch::nn::Conv2dOptions(in_channels, out_channels, 1).stride(stride).bias(false)),
            torch::nn::BatchNorm2d(out_channels)));
  }
}

torch::Tensor BasicBlockImpl::forward(const torch::Tensor& x) {
  auto out = torch::relu(bn1(conv1(x)));
  out = bn2(conv2(out));
  auto identity = downsample ? downsample->forward(x) : x;
  return torch::relu(out + identity);
}

UpBlockImpl::UpBlockImpl(int64_t in_channels, int64_t skip, int64_t out_channels) : skip_channels(skip) {
  proj = register_module("proj", conv3x3(in_channels, out_channels));
  bn1 = register_module("bn1", torch::nn::BatchNorm2d(out_channels));
  fuse = register_module("fuse", conv3x3(out_channels + skip, out_channels));
  bn2 = register_module("bn2", torch::nn::BatchNorm2d(out_channels));
}

torch::Tensor UpBlockImpl::forward(const torch::Tensor& x, const torch::Tensor& skip) {
  auto up = F::interpolate(x, F::InterpolateFuncOptions().scale_factor(std::vector<double>{2.0, 2.0}).mode(torch::kNearest));
  auto out = torch::relu(bn1(proj(up)));
  if (skip_channels > 0) out = torch::cat({out, skip}, 1);
  return torch::relu(bn2(fuse(out)));
}

namespace {

torch::nn::Sequential make_layer(int64_t in, int64_t out, int64_t stride) {
  return torch::nn::Sequential(BasicBlock(in, out, stride), BasicBlock(out, out, 1));
}

}  // namespace

EncoderDecoderImpl::EncoderDecoderImpl(int64_t in_channels, int64_t out_channels, int64_t base_channels)
    : base(base_channels) {
  const int64_t b = base_channels;
  stem = register_module("stem", torch::nn::Conv2d(torch::nn::Conv2dOptions(in_channels, b, 7).stride(2).padding(3).bias(false)));
  stem_bn = register_module("stem_bn", torch::nn::BatchNorm2d(b));
  layer1 = register_module("layer1", make_layer(b, b, 1));
  layer2 = register_module("layer2", make_layer(b, 2 * b, 2));
  layer3 = register_module("layer3", make_layer(2 * b, 4 * b, 2));
  layer4 = register_module("layer4", make_layer(4 * b, 8 * b, 2));
  up1 = register_module("up1", UpBlock(8 * b, 4 * b, 4 * b));
  up2 = register_module("up2", UpBlock(4 * b, 2 * b, 2 * b));
  up3 = register_module("up3", UpBlock(2 * b, b, b));
  up4 = register_module("up4", UpBlock(b, b, b));
  up5 = register_module("up5", UpBlock(b, 0, std::max<int64_t>(b / 2, 1)));
  head = register_module("head", torch::nn::Conv2d(torch::nn::Conv2dOptions(std::max<int64_t>(b / 2, 1), out_channels, 3).padding(1)));
}

int64_t EncoderDecoderImpl::stage_channels(int stage) const {
  static constexpr int64_t kMult[kFusionStages] = {8, 4, 2, 1};
  return kMult[stage] * base;
}

EncoderDecoderOutput EncoderDecoderImpl::forward(const torch::Tensor& x, const StageHook& hook) {
  const int64_t h = x.size(2), w = x.size(3);
  auto xp = pad_to_multiple(x, 32);

  auto e1 = torch::relu(stem_bn(stem(xp)));                                        // /2
  auto e2 = layer1->forward(F::max_pool2d(e1, F::MaxPool2dFuncOptions(3).stride(2).padding(1)));  // /4
  auto e3 = layer2->forward(e2);                                                    // /8
  auto e4 = layer3->forward(e3);                                                    // /16
  auto e5 = layer4->forward(e4);                                                    // /32

  EncoderDecoderOutput out;
  auto stage = [&](int i, torch::Tensor f) {
    if (hook) f = hook(i, f);
    out.stages.push_back(f);
    return f;
  };
  auto s = stage(0, e5);
  s = stage(1, up1(s, e4));
  s = stage(2, up2(s, e3));
  s = stage(3, up3(s, e2));
  s = up4(s, e1);
  s = up5(s, torch::Tensor());
  out.output = crop_to(head(s), h, w);
  return out;
}

}  // namespace rdfc::nn
