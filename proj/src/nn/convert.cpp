#include "rdfc/nn/convert.hpp"

#include <algorithm>

namespace rdfc::nn {

namespace {

// HWC grid -> [1, C, H, W] float tensor.
torch::Tensor grid_to_tensor(const Grid<float>& g) {
  auto t = torch::from_blob(const_cast<float*>(g.data().data()), {g.height(), g.width(), g.channels()},
                            torch::kFloat32);
  // clone: for one channel the permuted view is already contiguous and would alias g
  return t.permute({2, 0, 1}).unsqueeze(0).clone(at::MemoryFormat::Contiguous);
}

// [B, C, H, W] -> HWC values of sample `index`.
std::vector<float> tensor_to_values(const torch::Tensor& t, int64_t index, int64_t channels) {
  TORCH_CHECK(t.dim() == 4 && t.size(1) == channels, "expected [B,", channels, ",H,W] tensor, got ", t.sizes());
  auto s = t[index].detach().to(torch::kCPU, torch::kFloat32).permute({1, 2, 0}).contiguous();
  return {s.data_ptr<float>(), s.data_ptr<float>() + s.numel()};
}

}  // namespace

torch::Tensor to_tensor(const DepthMap& d) { return grid_to_tensor(d); }
torch::Tensor to_tensor(const RgbImage& rgb) { return grid_to_tensor(rgb); }
torch::Tensor to_tensor(const NormalMap& n) { return grid_to_tensor(n); }

torch::Tensor class_tensor(const SegMask& seg) {
  const auto codes = seg.class_codes();
  return torch::from_blob(const_cast<std::uint8_t*>(codes.data().data()), {1, codes.height(), codes.width()},
                          torch::kUInt8)
      .clone();
}

torch::Tensor to_tensor(const Mask& m) {
  return torch::from_blob(const_cast<std::uint8_t*>(m.data().data()), {1, 1, m.height(), m.width()}, torch::kUInt8)
      .to(torch::kBool);
}

DepthMap depth_from_tensor(const torch::Tensor& t, int64_t index) {
  auto v = tensor_to_values(t, index, 1);
  for (auto& x : v) x = std::max(x, 0.0f);
  return DepthMap(static_cast<int>(t.size(2)), static_cast<int>(t.size(3)), std::move(v));
}

ConfidenceMap confidence_from_tensor(const torch::Tensor& t, int64_t index) {
  return ConfidenceMap(static_cast<int>(t.size(2)), static_cast<int>(t.size(3)), tensor_to_values(t, index, 1));
}

RgbImage rgb_from_tensor(const torch::Tensor& t, int64_t index) {
  auto v = tensor_to_values(t, index, 3);
  for (auto& x : v) x = std::clamp(x, 0.0f, 1.0f);
  return RgbImage(static_cast<int>(t.size(2)), static_cast<int>(t.size(3)), std::move(v));
}

NormalMap normals_from_tensor(const torch::Tensor& t, int64_t index) {
  return NormalMap(static_cast<int>(t.size(2)), static_cast<int>(t.size(3)), tensor_to_values(t, index, 3));
}

}  // namespace rdfc::nn
