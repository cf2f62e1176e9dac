#pragma once

#include <functional>

#include <torch/torch.h>

namespace rdfc::gan {

enum class ScoreReduction { kMean, kSum };

/// Reduces a patch score map over patches and batch.
torch::Tensor reduce_scores(const torch::Tensor& scores, ScoreReduction r = ScoreReduction::kMean);

/// Critic scores of the four adversarial terms, already reduced.
struct CriticScores {
  torch::Tensor fake_depth;  // D(G(d_raw, r) | r)
  torch::Tensor real_depth;  // D(d_gt | r)
  torch::Tensor fake_rgb;    // D_r(G_r(d_gt))
  torch::Tensor real_rgb;    // D_r(r)
};

struct GanLosses {
  torch::Tensor d;   // L_D   = D(fake|r) - D(real|r)
  torch::Tensor g;   // L_G   = -D(fake|r)
  torch::Tensor dr;  // L_Dr  = D_r(fake) - D_r(r)
  torch::Tensor gr;  // L_Gr  = -D_r(fake)
};

/// The Wasserstein critic and generator losses. Routing is the caller's
/// job: evaluate the critic terms on detached generator outputs and the
/// generator terms with the critic frozen.
GanLosses gan_losses(const CriticScores& s);

/// mean |rgb_cycle - rgb| + mean over gt-valid pixels |depth_cycle - d_gt|.
torch::Tensor cycle_loss(const torch::Tensor& rgb_cycle, const torch::Tensor& rgb, const torch::Tensor& depth_cycle,
                         const torch::Tensor& d_gt);

/// L_D + L_G + L_Dr + L_Gr + L_cycle.
torch::Tensor rdfc_branch_loss(const GanLosses& l, const torch::Tensor& cycle);

/// Clamps every parameter of `critic` to [-c, c].
void clip_weights(torch::nn::Module& critic, double c);

/// lambda * E[(|grad_x critic(x_hat)| - 1)^2] on random interpolates of
/// real and fake. `seed` drives the interpolation weights.
torch::Tensor gradient_penalty(const std::function<torch::Tensor(const torch::Tensor&)>& critic,
                               const torch::Tensor& real, const torch::Tensor& fake, double lambda,
                               std::uint64_t seed);

}  // namespace rdfc::gan
