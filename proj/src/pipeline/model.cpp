#include "rdfc/pipeline/model.hpp"

#include <ATen/CPUGeneratorImpl.h>

#include "rdfc/core/random.hpp"
#include "rdfc/fusion/wadain.hpp"
#include "rdfc/mcn/losses.hpp"

namespace rdfc::pipeline {

RdfcModelImpl::RdfcModelImpl(const TrainConfig& c) {
  const int64_t b = c.base_channels;
  normal_gen = register_module("normal_gen", mcn::NormalGenerator(c.normal_input, b));
  mcn = register_module("mcn", mcn::McnNet(b, c.depth_scale));
  g = register_module("g", gan::DepthGenerator(b, c.depth_scale, c.attention_reduction));
  g_r = register_module("g_r", gan::RgbGenerator(b, c.depth_scale));
  d = register_module("d", gan::DepthCritic(b, c.depth_scale));
  d_r = register_module("d_r", gan::RgbCritic(b));
}

std::vector<torch::Tensor> RdfcModelImpl::critic_parameters() const {
  auto out = d->parameters();
  for (auto& p : d_r->parameters()) out.push_back(p);
  return out;
}

std::vector<torch::Tensor> RdfcModelImpl::mcn_group_parameters(ParamGroup ng_group) const {
  auto out = mcn->parameters();
  if (ng_group == ParamGroup::kMcn) {
    for (auto& p : normal_gen->parameters()) out.push_back(p);
  }
  return out;
}

std::vector<torch::Tensor> RdfcModelImpl::other_group_parameters(ParamGroup ng_group) const {
  std::vector<torch::Tensor> out;
  if (ng_group == ParamGroup::kOther) out = normal_gen->parameters();
  for (auto& p : g->parameters()) out.push_back(p);
  for (auto& p : g_r->parameters()) out.push_back(p);
  return out;
}

RdfcModel make_model(const TrainConfig& config) {
  auto gen = at::detail::getDefaultCPUGenerator();
  const auto saved = gen.get_state();
  torch::manual_seed(derive_seed(config.seed, {hash_string("init")}));
  RdfcModel model(config);
  nn::init_normal(*model->g);
  nn::init_normal(*model->g_r);
  nn::init_normal(*model->d);
  nn::init_normal(*model->d_r);
  gen.set_state(saved);
  return model;
}

Prediction forward(RdfcModel& model, const torch::Tensor& rgb, const torch::Tensor& depth) {
  Prediction p;
  p.normals = model->normal_gen->forward(rgb, depth / model->mcn->depth_scale);
  p.local = model->mcn->forward(depth, p.normals);
  p.fused = model->g->forward(rgb, p.local.latents);
  p.d_pred = fusion::confidence_fuse(p.local.d_l, p.local.c_l, p.fused.d_f, p.fused.c_f);
  return p;
}

Prediction infer(RdfcModel& model, const torch::Tensor& rgb, const torch::Tensor& depth) {
  torch::NoGradGuard no_grad;
  const bool was_training = model->is_training();
  model->eval();
  auto p = forward(model, rgb, depth);
  model->train(was_training);
  return p;
}

torch::Tensor overall_loss(const torch::Tensor& l_mcn, const torch::Tensor& l_rdfc, const torch::Tensor& d_pred,
                           const torch::Tensor& d_sup, double lambda_pred) {
  return l_mcn + l_rdfc + lambda_pred * mcn::masked_l1(d_pred, d_sup);
}

}  // namespace rdfc::pipeline
