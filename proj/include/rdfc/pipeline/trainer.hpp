#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

#include "rdfc/pipeline/data.hpp"
#include "rdfc/pipeline/model.hpp"

namespace rdfc::pipeline {

/// A non-finite loss; the message names the step, epoch and sample ids.
class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::int64_t kCheckpointVersion = 1;

struct StepLosses {
  double total = 0;  // generator objective actually minimized
  double mcn = 0;    // L_MCN
  double mnm = 0;
  double rdfc = 0;  // L_D + L_G + L_Dr + L_Gr + L_cycle
  double d = 0, g = 0, dr = 0, gr = 0, cycle = 0;
  double l1 = 0;      // masked L1 of d_pred against the supervision
  double critic = 0;  // critic objective of the last critic update (incl. penalty)

  bool finite() const;
};

enum class UpdatePhase { kCritic, kGenerator };

/// Alternating critic/generator training. Every random choice is derived
/// from (config.seed, step, sample index), so a run resumed from a
/// checkpoint continues exactly like an uninterrupted one.
class Trainer {
 public:
  Trainer(TrainConfig config, std::vector<SampleRecord> train_set);

  /// One batch: critic update(s) followed by one generator update.
  StepLosses step();
  /// Steps until total_steps(). `on_step` sees every step's losses.
  void run(const std::function<void(std::int64_t, const StepLosses&)>& on_step = nullptr);

  /// Called right after every critic update and every generator update.
  void set_update_hook(std::function<void(UpdatePhase)> hook) { update_hook_ = std::move(hook); }

  std::int64_t global_step() const { return step_; }
  int epoch() const { return static_cast<int>(step_ / steps_per_epoch()); }
  std::int64_t steps_per_epoch() const;
  /// min(max_steps, epochs * steps_per_epoch), max_steps = 0 meaning no cap.
  std::int64_t total_steps() const;

  const TrainConfig& config() const { return config_; }
  RdfcModel& model() { return model_; }
  const std::vector<SampleRecord>& samples() const { return samples_; }

  /// Batch of step `step` (deterministic; does not advance training).
  Batch make_batch(std::int64_t step) const;
  /// Sample order of an epoch.
  std::vector<std::size_t> epoch_order(int epoch) const;

  /// Mean per-sample RMSE of d_pred against the supervision depth over the
  /// training set, setting-A input, eval mode.
  double training_rmse();

  void save(const std::filesystem::path& path) const;
  static Trainer resume(const std::filesystem::path& path, std::vector<SampleRecord> train_set);

 private:
  void apply_lr_schedule();
  torch::Tensor critic_objective(const Batch& b, const torch::Tensor& fake_depth, const torch::Tensor& fake_rgb,
                                 std::int64_t round, gan::GanLosses* losses);

  TrainConfig config_;
  std::vector<SampleRecord> samples_;
  std::vector<SampleRecord> fixed_;  // network-sized samples when cropping is deterministic
  RdfcModel model_{nullptr};
  std::unique_ptr<torch::optim::AdamW> opt_mcn_;
  std::unique_ptr<torch::optim::Adam> opt_other_;
  std::unique_ptr<torch::optim::Adam> opt_critic_;
  std::int64_t step_ = 0;
  std::function<void(UpdatePhase)> update_hook_;
};

struct LoadedModel {
  TrainConfig config;
  RdfcModel model{nullptr};
  std::int64_t step = 0;
};

/// Reads the model part of a checkpoint. Throws IoError on an unreadable
/// file or an unknown format version.
LoadedModel load_model(const std::filesystem::path& path);

}  // namespace rdfc::pipeline
