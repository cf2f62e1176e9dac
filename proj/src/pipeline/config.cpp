#include "rdfc/pipeline/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace rdfc::pipeline {

std::string to_string(Setting s) {
  switch (s) {
    case Setting::kA:
      return "A";
    case Setting::kB:
      return "B";
    case Setting::kC:
      return "C";
  }
  return "?";
}

Setting setting_from_string(const std::string& s) {
  if (s == "A" || s == "a") return Setting::kA;
  if (s == "B" || s == "b") return Setting::kB;
  if (s == "C" || s == "c") return Setting::kC;
  throw ConfigError("unknown setting '" + s + "' (expected A, B or C)");
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

double parse_double(const std::string& key, const std::string& v) {
  double out = 0;
  auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw ConfigError("config key '" + key + "': expected a number, got '" + v + "'");
  }
  return out;
}

template <typename T>
T parse_int(const std::string& key, const std::string& v) {
  T out = 0;
  auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw ConfigError("config key '" + key + "': expected an integer, got '" + v + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("config key '" + key + "': expected true or false, got '" + v + "'");
}

template <typename E>
E parse_enum(const std::string& key, const std::string& v, const std::map<std::string, E>& names) {
  auto it = names.find(v);
  if (it == names.end()) {
    std::string options;
    for (const auto& [n, _] : names) options += (options.empty() ? "" : ", ") + n;
    throw ConfigError("config key '" + key + "': unknown value '" + v + "' (expected one of " + options + ")");
  }
  return it->second;
}

template <typename E>
std::string enum_name(E value, const std::map<std::string, E>& names) {
  for (const auto& [n, e] : names) {
    if (e == value) return n;
  }
  return "?";
}

const std::map<std::string, ParamGroup> kGroups{{"mcn", ParamGroup::kMcn}, {"other", ParamGroup::kOther}};
const std::map<std::string, mcn::NormalInput> kNormalInputs{{"rgbd", mcn::NormalInput::kRgbd},
                                                            {"rgb", mcn::NormalInput::kRgb}};
const std::map<std::string, Lipschitz> kLipschitz{{"clip", Lipschitz::kClip}, {"gp", Lipschitz::kGradientPenalty}};
const std::map<std::string, gan::ScoreReduction> kReductions{{"mean", gan::ScoreReduction::kMean},
                                                              {"sum", gan::ScoreReduction::kSum}};
const std::map<std::string, ManhattanLoss> kManhattan{{"per_class", ManhattanLoss::kPerClass},
                                                      {"wma", ManhattanLoss::kWma}};
const std::map<std::string, Setting> kSettings{{"A", Setting::kA}, {"B", Setting::kB}, {"C", Setting::kC}};
const std::map<std::string, Supervision> kSupervision{
    {"auto", Supervision::kAuto}, {"gt", Supervision::kGt}, {"raw", Supervision::kRaw}};

struct Entry {
  ConfigKey key;
  std::function<void(TrainConfig&, const std::string&)> set;
  std::function<std::string(const TrainConfig&)> get;
};

#define RDFC_REAL(name, doc)                                                                    \
  Entry {                                                                                       \
    {#name, doc}, [](TrainConfig& c, const std::string& v) { c.name = parse_double(#name, v); }, \
        [](const TrainConfig& c) { return fmt(c.name); }                                        \
  }
#define RDFC_INT(name, doc)                                                                                   \
  Entry {                                                                                                     \
    {#name, doc},                                                                                             \
        [](TrainConfig& c, const std::string& v) { c.name = parse_int<decltype(c.name)>(#name, v); },        \
        [](const TrainConfig& c) { return std::to_string(c.name); }                                           \
  }
#define RDFC_BOOL(name, doc)                                                                  \
  Entry {                                                                                     \
    {#name, doc}, [](TrainConfig& c, const std::string& v) { c.name = parse_bool(#name, v); }, \
        [](const TrainConfig& c) { return std::string(c.name ? "true" : "false"); }           \
  }
#define RDFC_ENUM(name, table, doc)                                                                   \
  Entry {                                                                                             \
    {#name, doc}, [](TrainConfig& c, const std::string& v) { c.name = parse_enum(#name, v, table); }, \
        [](const TrainConfig& c) { return enum_name(c.name, table); }                                 \
  }
#define RDFC_STRING(name, doc)                                                                              \
  Entry {                                                                                                   \
    {#name, doc}, [](TrainConfig& c, const std::string& v) { c.name = v; }, [](const TrainConfig& c) { \
      return c.name;                                                                                        \
    }                                                                                                       \
  }

Entry pseudo_toggle(pseudo::Method m, const std::string& doc) {
  const auto i = static_cast<std::size_t>(m);
  const std::string name = "pseudo_" + pseudo::to_string(m);
  return {{name, doc},
          [i, name](TrainConfig& c, const std::string& v) { c.pseudo_enabled[i] = parse_bool(name, v); },
          [i](const TrainConfig& c) { return std::string(c.pseudo_enabled[i] ? "true" : "false"); }};
}

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table{
      RDFC_REAL(lambda_l, "weight of the local-depth L1 term inside the MCN loss"),
      RDFC_REAL(lambda_pred, "weight of the L1 term on the fused prediction"),
      RDFC_REAL(mcn_lr, "initial learning rate of the MCN encoder-decoder (AdamW)"),
      RDFC_REAL(mcn_weight_decay, "decoupled weight decay of the MCN optimizer"),
      RDFC_REAL(other_lr, "initial learning rate of every other module (Adam)"),
      RDFC_REAL(beta1, "first-moment decay of all optimizers"),
      RDFC_REAL(beta2, "second-moment decay of all optimizers"),
      RDFC_ENUM(normal_generator_group, kGroups, "optimizer group of the normal generator: mcn | other"),
      RDFC_INT(epochs, "number of training epochs; also the end of the linear lr decay"),
      RDFC_INT(lr_decay_start, "epoch at which the linear lr decay begins"),
      RDFC_INT(max_steps, "stop after this many optimizer steps (0: run all epochs)"),
      RDFC_INT(batch_size, "samples per step"),
      RDFC_INT(seed, "master seed for initialization, shuffling, pseudo depth and sampling"),
      RDFC_INT(base_channels, "width of the first encoder stage (64 gives a 512-channel bottleneck)"),
      RDFC_REAL(depth_scale, "meters mapped to 1.0 at network inputs; depth outputs are scale * softplus"),
      RDFC_INT(attention_reduction, "channel reduction of the attention query/key projections"),
      RDFC_ENUM(normal_input, kNormalInputs, "normal generator input: rgbd | rgb"),
      RDFC_ENUM(lipschitz, kLipschitz, "critic constraint: clip (weight clipping) | gp (gradient penalty)"),
      RDFC_REAL(clip, "weight clipping bound c; critic parameters stay in [-c, c]"),
      RDFC_REAL(gp_weight, "gradient penalty weight when lipschitz = gp"),
      RDFC_INT(n_critic, "critic updates per generator update"),
      RDFC_ENUM(score_reduction, kReductions, "reduction of patch scores: mean | sum (sum is per sample)"),
      RDFC_ENUM(manhattan_loss, kManhattan, "plane terms: per_class (gravity-aligned) | wma (pairwise)"),
      RDFC_INT(wma_pair_budget, "pairs per pairwise term before random subsampling"),
      RDFC_ENUM(setting, kSettings, "training input: A raw-derived pseudo depth | B sparse raw | C sparse gt"),
      RDFC_INT(n_sample, "sparse samples per image in settings B and C"),
      RDFC_ENUM(supervision, kSupervision, "depth supervision: auto (gt if present, else raw) | gt | raw"),
      RDFC_INT(width, "network input width after preprocessing"),
      RDFC_INT(height, "network input height after preprocessing"),
      RDFC_BOOL(random_crop, "take random crops during training instead of center crops"),
      RDFC_INT(resize_width, "resize width before cropping to width (0: no margin)"),
      RDFC_INT(resize_height, "resize height before cropping to height (0: no margin)"),
      RDFC_REAL(pseudo_probability, "inclusion probability of each pseudo-depth method"),
      pseudo_toggle(pseudo::Method::kHighlight, "enable specular highlight masking"),
      pseudo_toggle(pseudo::Method::kBlack, "enable black-region masking"),
      pseudo_toggle(pseudo::Method::kGraphSeg, "enable graph-segment masking"),
      pseudo_toggle(pseudo::Method::kSemantic, "enable semantic-instance masking"),
      pseudo_toggle(pseudo::Method::kSemanticXor, "enable segmentation-disagreement masking"),
      RDFC_STRING(data_root, "dataset root with train/ and test/ splits (empty: synthetic scenes)"),
      RDFC_INT(synth_scenes, "number of synthetic training scenes when data_root is empty"),
      RDFC_INT(synth_seed, "seed of the synthetic scene generator"),
      RDFC_STRING(checkpoint_dir, "directory for per-epoch checkpoints (empty: none)"),
      RDFC_INT(log_every, "log losses every this many steps (0: never)"),
  };
  return table;
}

#undef RDFC_REAL
#undef RDFC_INT
#undef RDFC_BOOL
#undef RDFC_ENUM
#undef RDFC_STRING

}  // namespace

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> out;
    for (const auto& e : entries()) out.push_back(e.key);
    return out;
  }();
  return keys;
}

void TrainConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError("invalid config: " + msg); };
  if (!(mcn_lr > 0) || !(other_lr > 0)) fail("learning rates must be positive");
  if (mcn_weight_decay < 0) fail("mcn_weight_decay must be >= 0");
  if (!(beta1 > 0 && beta1 < 1) || !(beta2 > 0 && beta2 < 1)) fail("beta1 and beta2 must lie in (0, 1)");
  if (lambda_l < 0 || lambda_pred < 0) fail("loss weights must be >= 0");
  if (epochs < 1) fail("epochs must be >= 1");
  if (lr_decay_start < 0) fail("lr_decay_start must be >= 0");
  if (max_steps < 0) fail("max_steps must be >= 0");
  if (batch_size < 1) fail("batch_size must be >= 1");
  if (base_channels < 2) fail("base_channels must be >= 2");
  if (!(depth_scale > 0)) fail("depth_scale must be positive");
  if (attention_reduction < 1) fail("attention_reduction must be >= 1");
  if (!(clip > 0)) fail("clip must be positive");
  if (gp_weight < 0) fail("gp_weight must be >= 0");
  if (n_critic < 1) fail("n_critic must be >= 1");
  if (wma_pair_budget < 1) fail("wma_pair_budget must be >= 1");
  if (setting != Setting::kA && n_sample <= 0) fail("n_sample must be positive for settings B and C");
  if (width < 1 || height < 1) fail("width and height must be positive");
  if (resize_width != 0 && resize_width < width) fail("resize_width must be 0 or >= width");
  if (resize_height != 0 && resize_height < height) fail("resize_height must be 0 or >= height");
  if (!(pseudo_probability >= 0 && pseudo_probability <= 1)) fail("pseudo_probability must lie in [0, 1]");
  if (data_root.empty() && synth_scenes < 1) fail("synth_scenes must be >= 1 without a data_root");
  if (log_every < 0) fail("log_every must be >= 0");
}

pseudo::PseudoConfig TrainConfig::pseudo_config() const {
  pseudo::PseudoConfig p;
  p.method_probability = pseudo_probability;
  p.enabled = pseudo_enabled;
  return p;
}

TrainConfig parse_config(const std::string& text) {
  std::map<std::string, const Entry*> by_name;
  for (const auto& e : entries()) by_name[e.key.name] = &e;

  TrainConfig c;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    auto it = by_name.find(key);
    if (it == by_name.end()) throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    if (!seen.insert(key).second) {
      throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
    it->second->set(c, value);
  }
  c.validate();
  return c;
}

TrainConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_text(const TrainConfig& c) {
  std::ostringstream out;
  for (const auto& e : entries()) {
    out << "# " << e.key.doc << "\n" << e.key.name << " = " << e.get(c) << "\n";
  }
  return out.str();
}

double lr_multiplier(int epoch, int decay_start, int epochs) {
  if (decay_start >= epochs) return 1.0;
  const double span = epochs - decay_start;
  const double m = 1.0 - (std::max(epoch, decay_start) - decay_start) / span;
  return std::max(m, 0.0);
}

}  // namespace rdfc::pipeline
