#include "rdfc/pipeline/trainer.hpp"

#include <ATen/CPUGeneratorImpl.h>

#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "rdfc/core/io.hpp"
#include "rdfc/core/log.hpp"
#include "rdfc/core/random.hpp"
#include "rdfc/fusion/wadain.hpp"
#include "rdfc/mcn/losses.hpp"
#include "rdfc/metrics/metrics.hpp"
#include "rdfc/nn/convert.hpp"
#include "rdfc/pseudo/pseudo_depth.hpp"

namespace rdfc::pipeline {

namespace {

const std::uint64_t kOrderTag = hash_string("order");
const std::uint64_t kCropTag = hash_string("crop");
const std::uint64_t kPseudoTag = hash_string("pseudo");
const std::uint64_t kSparseTag = hash_string("sparse");
const std::uint64_t kWmaTag = hash_string("wma");
const std::uint64_t kGpTag = hash_string("gp");

template <typename Options, typename Optimizer>
void set_lr(Optimizer& opt, double lr) {
  for (auto& group : opt.param_groups()) static_cast<Options&>(group.options()).lr(lr);
}

void set_requires_grad(const std::vector<torch::Tensor>& params, bool on) {
  for (auto p : params) p.requires_grad_(on);
}

double value(const torch::Tensor& t) { return t.item<double>(); }

}  // namespace

bool StepLosses::finite() const {
  for (double v : {total, mcn, mnm, rdfc, d, g, dr, gr, cycle, l1, critic}) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

Trainer::Trainer(TrainConfig config, std::vector<SampleRecord> train_set)
    : config_(std::move(config)), samples_(std::move(train_set)) {
  config_.validate();
  if (samples_.empty()) throw ConfigError("empty training set");
  if (!config_.random_crop) {
    fixed_.reserve(samples_.size());
    for (const auto& s : samples_) fixed_.push_back(fit_to_network(s, config_, false, 0));
  }
  model_ = make_model(config_);
  const auto betas = std::make_tuple(config_.beta1, config_.beta2);
  opt_mcn_ = std::make_unique<torch::optim::AdamW>(
      model_->mcn_group_parameters(config_.normal_generator_group),
      torch::optim::AdamWOptions(config_.mcn_lr).betas(betas).weight_decay(config_.mcn_weight_decay));
  opt_other_ = std::make_unique<torch::optim::Adam>(model_->other_group_parameters(config_.normal_generator_group),
                                                    torch::optim::AdamOptions(config_.other_lr).betas(betas));
  opt_critic_ = std::make_unique<torch::optim::Adam>(model_->critic_parameters(),
                                                     torch::optim::AdamOptions(config_.other_lr).betas(betas));
}

std::int64_t Trainer::steps_per_epoch() const {
  const auto n = static_cast<std::int64_t>(samples_.size());
  return (n + config_.batch_size - 1) / config_.batch_size;
}

std::int64_t Trainer::total_steps() const {
  const std::int64_t all = config_.epochs * steps_per_epoch();
  return config_.max_steps > 0 ? std::min(all, config_.max_steps) : all;
}

std::vector<std::size_t> Trainer::epoch_order(int epoch) const {
  std::vector<std::size_t> order(samples_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(config_.seed, {kOrderTag, static_cast<std::uint64_t>(epoch)}));
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  return order;
}

Batch Trainer::make_batch(std::int64_t step) const {
  const auto spe = steps_per_epoch();
  const int ep = static_cast<int>(step / spe);
  const auto pos = static_cast<std::size_t>(step % spe);
  const auto order = epoch_order(ep);
  const auto bs = static_cast<std::size_t>(config_.batch_size);
  const auto pcfg = config_.pseudo_config();

  std::vector<torch::Tensor> rgb, input, sup, n_star, n_valid, classes;
  Batch b;
  for (std::size_t k = pos * bs; k < std::min(order.size(), (pos + 1) * bs); ++k) {
    const std::size_t i = order[k];
    const auto tags = [&](std::uint64_t tag) {
      return derive_seed(config_.seed, {tag, static_cast<std::uint64_t>(ep), static_cast<std::uint64_t>(i)});
    };
    const SampleRecord s = fixed_.empty() ? fit_to_network(samples_[i], config_, true, tags(kCropTag)) : fixed_[i];
    const DepthMap& d_sup = supervision_depth(s, config_.supervision);
    DepthMap d_in = config_.setting == Setting::kA
                        ? pseudo::make_pseudo_depth(s, nullptr, tags(kPseudoTag), pcfg).first
                        : setting_input(s, config_.setting, config_.n_sample, tags(kSparseTag));
    auto [normals, valid] = normal_targets(s, d_sup);

    rgb.push_back(nn::to_tensor(s.rgb));
    input.push_back(nn::to_tensor(d_in));
    sup.push_back(nn::to_tensor(d_sup));
    n_star.push_back(nn::to_tensor(normals));
    n_valid.push_back(nn::to_tensor(valid));
    classes.push_back(s.seg ? nn::class_tensor(*s.seg)
                            : torch::zeros({1, s.height(), s.width()}, torch::kUInt8));
    b.ids.push_back(s.id);
  }
  b.rgb = torch::cat(rgb);
  b.input = torch::cat(input);
  b.sup = torch::cat(sup);
  b.n_star = torch::cat(n_star);
  b.n_valid = torch::cat(n_valid);
  b.classes = torch::cat(classes);
  return b;
}

void Trainer::apply_lr_schedule() {
  const double m = lr_multiplier(epoch(), config_.lr_decay_start, config_.epochs);
  set_lr<torch::optim::AdamWOptions>(*opt_mcn_, config_.mcn_lr * m);
  set_lr<torch::optim::AdamOptions>(*opt_other_, config_.other_lr * m);
  set_lr<torch::optim::AdamOptions>(*opt_critic_, config_.other_lr * m);
}

torch::Tensor Trainer::critic_objective(const Batch& b, const torch::Tensor& fake_depth, const torch::Tensor& fake_rgb,
                                        std::int64_t round, gan::GanLosses* losses) {
  const auto r = config_.score_reduction;
  auto& d = model_->d;
  auto& d_r = model_->d_r;
  gan::CriticScores scores{gan::reduce_scores(d->forward(fake_depth, b.rgb), r),
                           gan::reduce_scores(d->forward(b.sup, b.rgb), r),
                           gan::reduce_scores(d_r->forward(fake_rgb), r), gan::reduce_scores(d_r->forward(b.rgb), r)};
  *losses = gan::gan_losses(scores);
  auto obj = losses->d + losses->dr;
  if (config_.lipschitz == Lipschitz::kGradientPenalty) {
    const auto s = static_cast<std::uint64_t>(step_), k = static_cast<std::uint64_t>(round);
    obj = obj +
          gan::gradient_penalty([&](const torch::Tensor& x) { return d->forward(x, b.rgb); }, b.sup, fake_depth,
                                config_.gp_weight, derive_seed(config_.seed, {kGpTag, s, k, 0})) +
          gan::gradient_penalty([&](const torch::Tensor& x) { return d_r->forward(x); }, b.rgb, fake_rgb,
                                config_.gp_weight, derive_seed(config_.seed, {kGpTag, s, k, 1}));
  }
  return obj;
}

StepLosses Trainer::step() {
  apply_lr_schedule();
  const Batch b = make_batch(step_);
  model_->train();
  StepLosses out;

  auto fail = [&](const std::string& what) {
    std::ostringstream msg;
    msg << "non-finite " << what << " at step " << step_ << " (epoch " << epoch() << "), batch ids:";
    for (const auto& id : b.ids) msg << ' ' << id;
    log::error(msg.str());
    throw TrainingError(msg.str());
  };

  auto p = forward(model_, b.rgb, b.input);
  auto rgb_fake = model_->g_r->forward(b.sup);

  gan::GanLosses cl;
  for (int k = 0; k < config_.n_critic; ++k) {
    opt_critic_->zero_grad();
    auto obj = critic_objective(b, p.fused.d_f.detach(), rgb_fake.detach(), k, &cl);
    out.critic = value(obj);
    if (!std::isfinite(out.critic)) fail("critic loss");
    obj.backward();
    opt_critic_->step();
    if (config_.lipschitz == Lipschitz::kClip) {
      gan::clip_weights(*model_->d, config_.clip);
      gan::clip_weights(*model_->d_r, config_.clip);
    }
    if (update_hook_) update_hook_(UpdatePhase::kCritic);
  }
  out.d = value(cl.d);
  out.dr = value(cl.dr);

  const auto critic_params = model_->critic_parameters();
  set_requires_grad(critic_params, false);

  torch::Tensor mnm;
  if (config_.manhattan_loss == ManhattanLoss::kPerClass) {
    mnm = mcn::mnm_loss(p.normals, b.n_star, b.classes, b.n_valid);
  } else {
    mnm = mcn::cosine_normal_loss(p.normals, b.n_star, b.n_valid) +
          mcn::wma_loss(p.normals, b.classes, config_.wma_pair_budget,
                        derive_seed(config_.seed, {kWmaTag, static_cast<std::uint64_t>(step_)}));
  }
  auto l_mcn = mcn::mcn_branch_loss(p.local.d_l, b.sup, mnm, config_.lambda_l);

  const auto r = config_.score_reduction;
  auto l_g = -gan::reduce_scores(model_->d->forward(p.fused.d_f, b.rgb), r);
  auto l_gr = -gan::reduce_scores(model_->d_r->forward(rgb_fake), r);

  std::vector<torch::Tensor> cycle_latents;
  {
    torch::NoGradGuard no_grad;
    cycle_latents = model_->mcn->forward(b.sup, p.normals.detach()).latents;
  }
  auto depth_cycle = model_->g->forward(rgb_fake, cycle_latents).d_f;
  auto rgb_cycle = model_->g_r->forward(p.fused.d_f);
  auto l_cycle = gan::cycle_loss(rgb_cycle, b.rgb, depth_cycle, b.sup);

  auto total = overall_loss(l_mcn, l_g + l_gr + l_cycle, p.d_pred, b.sup, config_.lambda_pred);

  out.total = value(total);
  out.mcn = value(l_mcn);
  out.mnm = value(mnm);
  out.g = value(l_g);
  out.gr = value(l_gr);
  out.cycle = value(l_cycle);
  out.l1 = value(mcn::masked_l1(p.d_pred, b.sup));
  out.rdfc = out.d + out.g + out.dr + out.gr + out.cycle;
  if (!out.finite()) {
    set_requires_grad(critic_params, true);
    fail("generator loss");
  }

  opt_mcn_->zero_grad();
  opt_other_->zero_grad();
  total.backward();
  opt_mcn_->step();
  opt_other_->step();
  set_requires_grad(critic_params, true);
  if (update_hook_) update_hook_(UpdatePhase::kGenerator);

  ++step_;
  return out;
}

void Trainer::run(const std::function<void(std::int64_t, const StepLosses&)>& on_step) {
  const auto spe = steps_per_epoch();
  while (step_ < total_steps()) {
    const auto losses = step();
    if (on_step) on_step(step_ - 1, losses);
    if (config_.log_every > 0 && (step_ % config_.log_every == 0 || step_ == total_steps())) {
      char line[256];
      std::snprintf(line, sizeof line, "step %lld epoch %d total %.4f mcn %.4f rdfc %.4f l1 %.4f critic %.4f",
                    static_cast<long long>(step_), epoch(), losses.total, losses.mcn, losses.rdfc, losses.l1,
                    losses.critic);
      log::info(line);
    }
    if (!config_.checkpoint_dir.empty() && (step_ % spe == 0 || step_ == total_steps())) {
      std::filesystem::create_directories(config_.checkpoint_dir);
      char name[64];
      std::snprintf(name, sizeof name, "epoch_%04lld.ckpt", static_cast<long long>((step_ + spe - 1) / spe));
      const auto dir = std::filesystem::path(config_.checkpoint_dir);
      save(dir / name);
      std::filesystem::copy_file(dir / name, dir / "last.ckpt", std::filesystem::copy_options::overwrite_existing);
    }
  }
}

double Trainer::training_rmse() {
  double sum = 0;
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const SampleRecord s = fixed_.empty() ? fit_to_network(samples_[i], config_, false, 0) : fixed_[i];
    const auto p = infer(model_, nn::to_tensor(s.rgb), nn::to_tensor(s.raw_depth));
    sum += metrics::rmse(nn::depth_from_tensor(p.d_pred), supervision_depth(s, config_.supervision));
  }
  return sum / static_cast<double>(samples_.size());
}

void Trainer::save(const std::filesystem::path& path) const {
  torch::serialize::OutputArchive ar;
  ar.write("format_version", torch::tensor(kCheckpointVersion, torch::kInt64));
  ar.write("config", c10::IValue(to_text(config_)));
  ar.write("step", torch::tensor(step_, torch::kInt64));
  ar.write("epoch", torch::tensor(static_cast<std::int64_t>(epoch()), torch::kInt64));
  ar.write("torch_rng", at::detail::getDefaultCPUGenerator().get_state());
  torch::serialize::OutputArchive m, o1, o2, o3;
  model_->save(m);
  opt_mcn_->save(o1);
  opt_other_->save(o2);
  opt_critic_->save(o3);
  ar.write("model", m);
  ar.write("opt_mcn", o1);
  ar.write("opt_other", o2);
  ar.write("opt_critic", o3);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  ar.save_to(path.string());
}

namespace {

torch::serialize::InputArchive open_checkpoint(const std::filesystem::path& path, TrainConfig& config,
                                               std::int64_t& step) {
  if (!std::filesystem::is_regular_file(path)) throw IoError("cannot read checkpoint: " + path.string());
  torch::serialize::InputArchive ar;
  try {
    ar.load_from(path.string());
  } catch (const c10::Error& e) {
    throw IoError("malformed checkpoint: " + path.string());
  }
  torch::Tensor version, step_t;
  c10::IValue text;
  try {
    ar.read("format_version", version);
    ar.read("config", text);
    ar.read("step", step_t);
  } catch (const c10::Error& e) {
    throw IoError("malformed checkpoint: " + path.string());
  }
  if (version.item<std::int64_t>() != kCheckpointVersion) {
    throw IoError("unsupported checkpoint version " + std::to_string(version.item<std::int64_t>()) + ": " +
                      path.string());
  }
  config = parse_config(text.toStringRef());
  step = step_t.item<std::int64_t>();
  return ar;
}

}  // namespace

Trainer Trainer::resume(const std::filesystem::path& path, std::vector<SampleRecord> train_set) {
  TrainConfig config;
  std::int64_t step = 0;
  auto ar = open_checkpoint(path, config, step);
  Trainer t(config, std::move(train_set));
  torch::serialize::InputArchive m, o1, o2, o3;
  ar.read("model", m);
  ar.read("opt_mcn", o1);
  ar.read("opt_other", o2);
  ar.read("opt_critic", o3);
  t.model_->load(m);
  t.opt_mcn_->load(o1);
  t.opt_other_->load(o2);
  t.opt_critic_->load(o3);
  torch::Tensor rng;
  ar.read("torch_rng", rng);
  auto gen = at::detail::getDefaultCPUGenerator();
  gen.set_state(rng);
  t.step_ = step;
  return t;
}

LoadedModel load_model(const std::filesystem::path& path) {
  LoadedModel out;
  auto ar = open_checkpoint(path, out.config, out.step);
  out.model = make_model(out.config);
  torch::serialize::InputArchive m;
  ar.read("model", m);
  out.model->load(m);
  out.model->eval();
  return out;
}

}  // namespace rdfc::pipeline
