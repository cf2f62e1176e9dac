#include "rdfc/fusion/wadain.hpp"

#include <algorithm>
#include <cmath>

namespace rdfc::fusion {

namespace {

// Keeps d(sigma)/d(var) finite on constant channels; negligible otherwise.
constexpr double kVarFloor = 1e-12;

}  // namespace

AttentionMapImpl::AttentionMapImpl(int64_t channels, int64_t reduction)
    : reduced(std::max<int64_t>(channels / reduction, 1)) {
  query = register_module("query", torch::nn::Conv2d(torch::nn::Conv2dOptions(channels, reduced, 1)));
  key = register_module("key", torch::nn::Conv2d(torch::nn::Conv2dOptions(channels, reduced, 1)));
  value = register_module("value", torch::nn::Conv2d(torch::nn::Conv2dOptions(channels, 1, 1)));
}

torch::Tensor AttentionMapImpl::forward(const torch::Tensor& x) {
  const auto b = x.size(0), h = x.size(2), w = x.size(3);
  auto q = query(x).view({b, reduced, h * w}).transpose(1, 2);  // [B, N, d]
  auto k = key(x).view({b, reduced, h * w});                    // [B, d, N]
  auto v = value(x).view({b, h * w, 1});                        // [B, N, 1]
  auto attn = torch::softmax(torch::bmm(q, k) / std::sqrt(static_cast<double>(reduced)), -1);
  return torch::bmm(attn, v).view({b, 1, h, w});
}

std::pair<torch::Tensor, torch::Tensor> channel_stats(const torch::Tensor& x) {
  auto mu = x.mean({2, 3}, /*keepdim=*/true);
  auto var = (x - mu).pow(2).mean({2, 3}, /*keepdim=*/true);
  return {mu, torch::sqrt(var + kVarFloor)};
}

torch::Tensor wadain_combine(const torch::Tensor& z, const torch::Tensor& f_r, const torch::Tensor& attn_z,
                             const torch::Tensor& attn_f) {
  auto [mu_z, sigma_z] = channel_stats(z);
  auto [mu_f, sigma_f] = channel_stats(f_r);
  auto y_s = sigma_z * (f_r - mu_f) / (sigma_f + kContentEps);
  return y_s * attn_z + mu_z * attn_f;
}

torch::Tensor adain(const torch::Tensor& z, const torch::Tensor& f_r) {
  auto [mu_z, sigma_z] = channel_stats(z);
  auto [mu_f, sigma_f] = channel_stats(f_r);
  return sigma_z * (f_r - mu_f) / (sigma_f + kContentEps) + mu_z;
}

WAdaINImpl::WAdaINImpl(int64_t channels, int64_t reduction) {
  attn_z = register_module("attn_z", AttentionMap(channels, reduction));
  attn_f = register_module("attn_f", AttentionMap(channels, reduction));
}

torch::Tensor WAdaINImpl::forward(const torch::Tensor& z, const torch::Tensor& f_r) {
  if (z.sizes() != f_r.sizes()) {
    throw ParameterError("W-AdaIN: depth feature " + std::string(c10::str(z.sizes())) +
                         " and rgb feature " + std::string(c10::str(f_r.sizes())) + " differ in shape");
  }
  return wadain_combine(z, f_r, attn_z(z), attn_f(f_r));
}

torch::Tensor confidence_fuse(const torch::Tensor& d_l, const torch::Tensor& c_l, const torch::Tensor& d_f,
                              const torch::Tensor& c_f) {
  auto m = torch::maximum(c_l, c_f).detach();
  auto w_l = torch::exp(c_l - m);
  auto w_f = torch::exp(c_f - m);
  // Stays inside [min(d_l, d_f), max(d_l, d_f)] under rounding.
  auto d = d_l + w_f / (w_l + w_f) * (d_f - d_l);
  return torch::clamp(d, torch::minimum(d_l, d_f), torch::maximum(d_l, d_f));
}

DepthMap confidence_fuse(const DepthMap& d_l, const ConfidenceMap& c_l, const DepthMap& d_f, const ConfidenceMap& c_f) {
  if (!d_l.same_shape(c_l) || !d_l.same_shape(d_f) || !d_l.same_shape(c_f)) {
    throw ParameterError("confidence_fuse: maps differ in size");
  }
  DepthMap out(d_l.height(), d_l.width());
  auto dl = d_l.data(), df = d_f.data(), cl = c_l.data(), cf = c_f.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    const double m = std::max(cl[i], cf[i]);
    const double wl = std::exp(cl[i] - m), wf = std::exp(cf[i] - m);
    const double d = dl[i] + wf / (wl + wf) * (static_cast<double>(df[i]) - dl[i]);
    dst[i] = static_cast<float>(std::clamp<double>(d, std::min(dl[i], df[i]), std::max(dl[i], df[i])));
  }
  return out;
}

}  // namespace rdfc::fusion
