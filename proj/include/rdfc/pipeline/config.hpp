#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "rdfc/gan/losses.hpp"
#include "rdfc/mcn/networks.hpp"
#include "rdfc/pseudo/pseudo_depth.hpp"

namespace rdfc::pipeline {

/// Invalid or inconsistent configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Evaluation (and training-input) regime.
///   A: raw depth as input
///   B: n_sample pixels drawn from the raw depth
///   C: n_sample pixels drawn from the ground truth
enum class Setting { kA, kB, kC };
std::string to_string(Setting s);
Setting setting_from_string(const std::string& s);

enum class Lipschitz { kClip, kGradientPenalty };
enum class ManhattanLoss { kPerClass, kWma };
/// kAuto uses gt when the sample has it, raw depth otherwise.
enum class Supervision { kAuto, kGt, kRaw };
enum class ParamGroup { kMcn, kOther };

struct TrainConfig {
  // loss weights
  double lambda_l = 0.5;
  double lambda_pred = 5.0;

  // optimizers
  double mcn_lr = 0.002;
  double mcn_weight_decay = 0.01;
  double other_lr = 0.004;
  double beta1 = 0.5;
  double beta2 = 0.999;
  ParamGroup normal_generator_group = ParamGroup::kOther;

  // schedule
  int epochs = 150;
  int lr_decay_start = 100;
  std::int64_t max_steps = 0;  // 0: run all epochs
  int batch_size = 4;
  std::uint64_t seed = 0;

  // networks
  int base_channels = 64;
  double depth_scale = 10.0;
  int attention_reduction = 8;
  mcn::NormalInput normal_input = mcn::NormalInput::kRgbd;

  // adversarial
  Lipschitz lipschitz = Lipschitz::kClip;
  double clip = 0.01;
  double gp_weight = 10.0;
  int n_critic = 1;
  gan::ScoreReduction score_reduction = gan::ScoreReduction::kMean;

  // Manhattan terms
  ManhattanLoss manhattan_loss = ManhattanLoss::kPerClass;
  std::int64_t wma_pair_budget = 4096;

  // inputs
  Setting setting = Setting::kA;
  int n_sample = 500;
  Supervision supervision = Supervision::kAuto;
  int width = 64;
  int height = 48;
  bool random_crop = false;
  int resize_width = 0;  // images are resized to this before cropping; 0: width
  int resize_height = 0;  // 0: height

  // pseudo depth
  double pseudo_probability = 0.5;
  std::array<bool, pseudo::kMethodCount> pseudo_enabled{true, true, true, true, true};

  // data
  std::string data_root;  // empty: in-memory synthetic scenes
  int synth_scenes = 16;
  std::uint64_t synth_seed = 1;

  // output
  std::string checkpoint_dir;  // empty: no per-epoch checkpoints
  int log_every = 10;

  /// Throws ConfigError on an invalid value.
  void validate() const;
  pseudo::PseudoConfig pseudo_config() const;
};

/// Parses a flat `key = value` text; `#` starts a comment. Unknown keys,
/// malformed values and invalid combinations raise ConfigError.
TrainConfig parse_config(const std::string& text);
TrainConfig load_config(const std::filesystem::path& path);
/// Serializes every key with its documentation; parse_config(to_text(c))
/// reproduces c.
std::string to_text(const TrainConfig& c);

struct ConfigKey {
  std::string name;
  std::string doc;
};
/// All recognized keys in file order.
const std::vector<ConfigKey>& config_keys();

/// lr_epoch / lr_0 = 1 - (max(epoch, start) - start) / (epochs - start),
/// clamped at 0 past the last epoch. 1 throughout when start >= epochs.
double lr_multiplier(int epoch, int decay_start, int epochs);

}  // namespace rdfc::pipeline
