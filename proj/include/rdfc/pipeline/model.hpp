#pragma once

#include <torch/torch.h>

#include "rdfc/gan/networks.hpp"
#include "rdfc/mcn/networks.hpp"
#include "rdfc/pipeline/config.hpp"

namespace rdfc::pipeline {

/// Every trainable network of the model.
struct RdfcModelImpl : torch::nn::Module {
  explicit RdfcModelImpl(const TrainConfig& config);

  mcn::NormalGenerator normal_gen{nullptr};
  mcn::McnNet mcn{nullptr};
  gan::DepthGenerator g{nullptr};
  gan::RgbGenerator g_r{nullptr};
  gan::DepthCritic d{nullptr};
  gan::RgbCritic d_r{nullptr};

  /// Parameters of the two critics.
  std::vector<torch::Tensor> critic_parameters() const;
  /// Everything but the critics, split by optimizer group.
  std::vector<torch::Tensor> mcn_group_parameters(ParamGroup normal_generator_group) const;
  std::vector<torch::Tensor> other_group_parameters(ParamGroup normal_generator_group) const;
};
TORCH_MODULE(RdfcModel);

/// Builds the model with the configured seed (initialization is seeded
/// from config.seed and is independent of the global torch generator).
RdfcModel make_model(const TrainConfig& config);

/// Full forward pass of both branches and the fusion head.
struct Prediction {
  torch::Tensor normals;  // [B,3,H,W]
  mcn::McnOutput local;
  gan::GanOutput fused;
  torch::Tensor d_pred;  // [B,1,H,W]
};

/// `depth` is in meters with 0 marking holes.
Prediction forward(RdfcModel& model, const torch::Tensor& rgb, const torch::Tensor& depth);

/// Eval-mode, no-grad forward.
Prediction infer(RdfcModel& model, const torch::Tensor& rgb, const torch::Tensor& depth);

/// L_MCN + L_RDFC + lambda_pred * mean over d_sup > 0 of |d_pred - d_sup|.
torch::Tensor overall_loss(const torch::Tensor& l_mcn, const torch::Tensor& l_rdfc, const torch::Tensor& d_pred,
                           const torch::Tensor& d_sup, double lambda_pred = 5.0);

}  // namespace rdfc::pipeline
