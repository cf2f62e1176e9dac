#include "rdfc/gan/losses.hpp"

#include <ATen/CPUGeneratorImpl.h>

#include "rdfc/mcn/losses.hpp"

namespace rdfc::gan {

torch::Tensor reduce_scores(const torch::Tensor& scores, ScoreReduction r) {
  if (r == ScoreReduction::kSum) return scores.sum() / static_cast<double>(scores.size(0));
  return scores.mean();
}

GanLosses gan_losses(const CriticScores& s) {
  return {s.fake_depth - s.real_depth, -s.fake_depth, s.fake_rgb - s.real_rgb, -s.fake_rgb};
}

torch::Tensor cycle_loss(const torch::Tensor& rgb_cycle, const torch::Tensor& rgb, const torch::Tensor& depth_cycle,
                         const torch::Tensor& d_gt) {
  return (rgb_cycle - rgb).abs().mean() + mcn::masked_l1(depth_cycle, d_gt);
}

torch::Tensor rdfc_branch_loss(const GanLosses& l, const torch::Tensor& cycle) {
  return l.d + l.g + l.dr + l.gr + cycle;
}

void clip_weights(torch::nn::Module& critic, double c) {
  torch::NoGradGuard no_grad;
  for (auto& p : critic.parameters()) p.clamp_(-c, c);
}

torch::Tensor gradient_penalty(const std::function<torch::Tensor(const torch::Tensor&)>& critic,
                               const torch::Tensor& real, const torch::Tensor& fake, double lambda,
                               std::uint64_t seed) {
  auto gen = at::make_generator<at::CPUGeneratorImpl>(seed);
  auto alpha = torch::rand({real.size(0), 1, 1, 1}, gen, real.options());
  auto x_hat = (alpha * real.detach() + (1 - alpha) * fake.detach()).requires_grad_(true);
  auto scores = critic(x_hat);
  auto grad = torch::autograd::grad({scores.sum()}, {x_hat}, /*grad_outputs=*/{}, /*retain_graph=*/true,
                                    /*create_graph=*/true)[0];
  auto norm = grad.reshape({grad.size(0), -1}).norm(2, 1);
  return lambda * (norm - 1).pow(2).mean();
}

}  // namespace rdfc::gan
