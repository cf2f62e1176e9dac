// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
// failure.

#include <torch/torch.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "nn_oracles.hpp"
#include "oracles.hpp"
#include "rdfc/core/log.hpp"
#include "rdfc/core/random.hpp"
#include "rdfc/data/synth.hpp"
#include "rdfc/fusion/wadain.hpp"
#include "rdfc/gan/losses.hpp"
#include "rdfc/mcn/losses.hpp"
#include "rdfc/metrics/metrics.hpp"
#include "rdfc/nn/convert.hpp"
#include "rdfc/pipeline/data.hpp"
#include "rdfc/pipeline/evaluate.hpp"
#include "rdfc/pipeline/model.hpp"
#include "rdfc/pipeline/trainer.hpp"
#include "rdfc/pseudo/masks.hpp"
#include "rdfc/pseudo/pseudo_depth.hpp"

using namespace rdfc;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail << "failed: " << what << "; ";
    pass = pass && ok;
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

DepthMap random_depth(Rng& rng, int h, int w, double hole_rate) {
  DepthMap d(h, w);
  for (auto& v : d.data()) v = rng.bernoulli(hole_rate) ? 0.0f : static_cast<float>(rng.uniform(0.3, 8.0));
  return d;
}

// ---------------------------------------------------------------------------

void metric_oracles(Outcome& out) {
  const auto t0 = Clock::now();
  Rng rng(101);
  double worst_cd = 0, worst_f1 = 0;
  bool exact_pr = true, exact_delta = true;
  for (int trial = 0; trial < 200; ++trial) {
    const double extent = rng.uniform(0.05, 1.0);
    const auto a = oracle::random_cloud(rng, 1 + static_cast<int>(rng.below(500)), extent);
    const auto b = oracle::random_cloud(rng, 1 + static_cast<int>(rng.below(500)), extent);
    worst_cd = std::max(worst_cd, std::abs(metrics::chamfer(a, b) - oracle::chamfer(a, b)));
    const auto got = metrics::f1_score(a, b);
    const auto want = oracle::f1_score(a, b, metrics::kF1Thresholds);
    for (int t = 0; t < 3; ++t) {
      exact_pr = exact_pr && got.precision[t] == want.precision[t] && got.recall[t] == want.recall[t];
    }
    worst_f1 = std::max(worst_f1, std::abs(got.f1 - want.f1));

    const int h = 1 + static_cast<int>(rng.below(40)), w = 1 + static_cast<int>(rng.below(40));
    auto gt = random_depth(rng, h, w, 0.2);
    gt.data()[0] = 1.0f;  // at least one valid pixel
    const auto pred = random_depth(rng, h, w, 0.05);
    for (double th : metrics::kDeltaThresholds) {
      exact_delta = exact_delta && metrics::delta(pred, gt, th) == oracle::delta(pred, gt, th);
    }
  }
  const double secs = seconds_since(t0);
  out.require(worst_cd <= 1e-9, "chamfer within 1e-9");
  out.require(exact_pr, "f1 precision/recall exact");
  out.require(worst_f1 <= 1e-9, "f1 within 1e-9");
  out.require(exact_delta, "delta exact");
  out.require(secs < 60, "runtime < 60 s");
  out.detail << "200 pairs; max |chamfer diff| " << worst_cd << ", max |f1 diff| " << worst_f1 << ", " << secs << " s";
}

void formula_fidelity(Outcome& out) {
  torch::manual_seed(202);
  Rng rng(202);
  double worst_w = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int64_t c = 1 + static_cast<int64_t>(rng.below(12));
    const int64_t h = 1 + static_cast<int64_t>(rng.below(6)), w = 1 + static_cast<int64_t>(rng.below(6));
    fusion::WAdaIN m(c, 1 + static_cast<int64_t>(rng.below(8)));
    m->to(torch::kDouble);
    const auto z = torch::randn({1, c, h, w}, torch::kDouble) * rng.uniform(0.1, 3.0) + rng.uniform(-2.0, 2.0);
    const auto f = torch::randn({1, c, h, w}, torch::kDouble) * rng.uniform(0.1, 3.0) + rng.uniform(-2.0, 2.0);
    const auto got = m(z, f).contiguous();
    const auto fz = oracle::feature(z), ff = oracle::feature(f);
    const auto want = oracle::wadain(fz, ff, oracle::attention(fz, oracle::attn_weights(m->attn_z)),
                                     oracle::attention(ff, oracle::attn_weights(m->attn_f)), fusion::kContentEps);
    const double* g = got.data_ptr<double>();
    for (int64_t k = 0; k < c; ++k) {
      for (int64_t i = 0; i < h * w; ++i) worst_w = std::max(worst_w, std::abs(g[k * h * w + i] - want[k][i]));
    }
  }

  const int64_t n = 1000000;
  const auto dl = torch::rand({1, 1, 1000, 1000}, torch::kDouble) * 10;
  const auto df = torch::rand({1, 1, 1000, 1000}, torch::kDouble) * 10;
  const auto cl = torch::randn({1, 1, 1000, 1000}, torch::kDouble) * 50;
  const auto cf = torch::randn({1, 1, 1000, 1000}, torch::kDouble) * 50;
  const auto d = fusion::confidence_fuse(dl, cl, df, cf).contiguous();
  const double *pd = d.data_ptr<double>(), *pl = dl.data_ptr<double>(), *pf = df.data_ptr<double>(),
               *ql = cl.data_ptr<double>(), *qf = cf.data_ptr<double>();
  double worst_f = 0;
  int64_t outside = 0;
  for (int64_t i = 0; i < n; ++i) {
    worst_f = std::max(worst_f, std::abs(pd[i] - oracle::fuse(pl[i], ql[i], pf[i], qf[i])));
    if (pd[i] < std::min(pl[i], pf[i]) || pd[i] > std::max(pl[i], pf[i])) ++outside;
  }
  out.require(worst_w <= 1e-6, "wadain within 1e-6");
  out.require(worst_f <= 1e-9, "confidence_fuse within 1e-9");
  out.require(outside == 0, "convexity");
  out.detail << "wadain max diff " << worst_w << " over 100 inputs; fuse max diff " << worst_f << ", " << outside
             << " of 10^6 pixels outside [min, max]";
}

void gradient_checks(Outcome& out) {
  const auto t0 = Clock::now();
  torch::manual_seed(303);
  Rng rng(303);
  std::vector<std::uint8_t> codes(64);
  for (auto& c : codes) c = static_cast<std::uint8_t>(rng.below(4));
  const auto cls = torch::from_blob(codes.data(), {1, 8, 8}, torch::kUInt8).clone();
  const auto star = torch::randn({1, 3, 8, 8}, torch::kDouble);
  const auto n0 = torch::randn({1, 3, 8, 8}, torch::kDouble);

  fusion::WAdaIN w(2);
  w->to(torch::kDouble);
  const auto z0 = torch::randn({1, 2, 4, 4}, torch::kDouble) + 0.5, f0 = torch::randn({1, 2, 4, 4}, torch::kDouble);
  const auto proj = torch::randn({1, 2, 4, 4}, torch::kDouble);

  const auto rgb = torch::rand({1, 3, 4, 4}, torch::kDouble), d_gt = torch::rand({1, 1, 4, 4}, torch::kDouble) * 3 + 0.5;
  const auto rgb_c0 = rgb + torch::randn({1, 3, 4, 4}, torch::kDouble) * 0.2;
  const auto d_c0 = d_gt + torch::randn({1, 1, 4, 4}, torch::kDouble) * 0.3;
  const auto d_sup = d_gt.clone();

  using F = std::function<torch::Tensor(const torch::Tensor&)>;
  const std::vector<std::tuple<std::string, F, torch::Tensor>> checks{
      {"L_n", [&](const torch::Tensor& n) { return mcn::cosine_normal_loss(n, star); }, n0},
      {"L_floor", [&](const torch::Tensor& n) { return mcn::plane_orientation_losses(n, cls).floor; }, n0},
      {"L_ceiling", [&](const torch::Tensor& n) { return mcn::plane_orientation_losses(n, cls).ceiling; }, n0},
      {"L_wall", [&](const torch::Tensor& n) { return mcn::plane_orientation_losses(n, cls).wall; }, n0},
      {"L_WMA", [&](const torch::Tensor& n) { return mcn::wma_loss(n, cls, 1 << 20, 0); }, n0},
      {"wadain/z", [&](const torch::Tensor& z) { return (w(z, f0) * proj).sum(); }, z0},
      {"wadain/f", [&](const torch::Tensor& f) { return (w(z0, f) * proj).sum(); }, f0},
      {"cycle/rgb", [&](const torch::Tensor& r) { return gan::cycle_loss(r, rgb, d_c0, d_gt); }, rgb_c0},
      {"cycle/depth", [&](const torch::Tensor& d) { return gan::cycle_loss(rgb_c0, rgb, d, d_gt); }, d_c0},
      {"overall", [&](const torch::Tensor& d) {
         return pipeline::overall_loss(d.mean() * d.mean(), d.pow(2).sum(), d, d_sup);
       }, d_c0},
  };
  double worst = 0;
  for (const auto& [name, f, x] : checks) {
    const auto r = oracle::grad_check(f, x, 1e-5);
    out.require(r.rel_error < 1e-4 && r.norm > 0, name);
    worst = std::max(worst, r.rel_error);
  }
  const double secs = seconds_since(t0);
  out.require(secs < 300, "runtime < 5 min");
  out.detail << checks.size() << " checks; worst relative error " << worst << ", " << secs << " s";
}

void manhattan_anchors(Outcome& out) {
  int scenes = 0;
  double worst = 0;
  auto check_scene = [&](const data::SynthSceneSpec& spec, std::uint64_t seed) {
    const auto s = data::synth_scene(spec, seed);
    const auto n = nn::to_tensor(*s.gt_normals).to(torch::kDouble);
    const auto cls = nn::class_tensor(*s.seg);
    const auto codes = cls.to(torch::kLong);
    if (!(codes == mcn::kFloor).any().item<bool>() || !(codes == mcn::kCeiling).any().item<bool>() ||
        !(codes == mcn::kWall).any().item<bool>()) {
      return;
    }
    ++scenes;
    const auto p = mcn::plane_orientation_losses(n, cls);
    worst = std::max({worst, std::abs(p.floor.item<double>() + 1.0), std::abs(p.ceiling.item<double>() + 1.0),
                      std::abs(p.wall.item<double>()),
                      std::abs(mcn::wma_loss(n, cls, 1 << 22, 0).item<double>() + 1.0)});
  };
  check_scene(data::SynthSceneSpec{}, 0);
  for (std::uint64_t seed = 0; seed < 40; ++seed) check_scene(data::random_scene_spec(seed, 64, 48), seed);
  out.require(scenes >= 10, "enough scenes showing floor, ceiling and walls");
  out.require(worst <= 1e-6, "anchors within 1e-6");
  out.detail << scenes << " scenes; max deviation " << worst;
}

void pseudo_statistics(Outcome& out) {
  std::vector<SampleRecord> scenes;
  for (std::uint64_t i = 0; i < 8; ++i) scenes.push_back(data::synth_scene(data::random_scene_spec(i, 32, 24), i));
  std::array<int, pseudo::kMethodCount> hits{};
  int violations = 0;
  const int draws = 10000;
  for (int seed = 0; seed < draws; ++seed) {
    const auto& s = scenes[static_cast<std::size_t>(seed) % scenes.size()];
    const auto [d, masks] = pseudo::make_pseudo_depth(s, nullptr, static_cast<std::uint64_t>(seed));
    for (int m = 0; m < pseudo::kMethodCount; ++m) hits[m] += masks.applied[m];
    for (std::size_t i = 0; i < d.data().size(); ++i) {
      if (d.data()[i] > 0 && d.data()[i] != s.raw_depth.data()[i]) {
        ++violations;
        break;
      }
    }
  }
  out.detail << "frequencies";
  for (int m = 0; m < pseudo::kMethodCount; ++m) {
    const double f = static_cast<double>(hits[m]) / draws;
    out.detail << ' ' << f;
    out.require(f >= 0.48 && f <= 0.52, "frequency of " + pseudo::to_string(static_cast<pseudo::Method>(m)));
  }
  out.require(violations == 0, "subset of valid input");

  // Every 8-bit (r, g, b) triple with r and g on a gradient and b cycling.
  RgbImage img(256, 256);
  for (int r = 0; r < 256; ++r) {
    for (int c = 0; c < 256; ++c) {
      img.at(r, c, 0) = static_cast<float>(c) / 255.0f;
      img.at(r, c, 1) = static_cast<float>(r) / 255.0f;
      img.at(r, c, 2) = static_cast<float>((r * 7 + c * 3) % 256) / 255.0f;
    }
  }
  const Mask m = pseudo::black_mask(img);
  int mismatches = 0;
  for (int r = 0; r < 256; ++r) {
    for (int c = 0; c < 256; ++c) {
      const bool want = c <= 5 && r <= 5 && (r * 7 + c * 3) % 256 <= 5;
      mismatches += (m.at(r, c) != 0) != want;
    }
  }
  out.require(mismatches == 0, "black_mask threshold");
  out.detail << "; " << violations << " subset violations; black_mask mismatches " << mismatches;
}

void training_smoke(Outcome& out) {
  const auto t0 = Clock::now();
  pipeline::TrainConfig c;
  c.base_channels = 32;
  c.synth_scenes = 16;
  c.width = 64;
  c.height = 48;
  c.max_steps = 300;
  c.epochs = 1000;
  c.lr_decay_start = 1000;
  c.seed = 1;
  c.log_every = 0;
  pipeline::Trainer t(c, pipeline::training_set(c));
  const double initial = t.training_rmse();
  double worst_param = 0;
  bool finite = true;
  t.set_update_hook([&](pipeline::UpdatePhase phase) {
    if (phase != pipeline::UpdatePhase::kCritic) return;
    for (const auto& p : t.model()->critic_parameters()) worst_param = std::max(worst_param, p.abs().max().item<double>());
  });
  try {
    t.run([&](std::int64_t, const pipeline::StepLosses& l) { finite = finite && l.finite(); });
  } catch (const pipeline::TrainingError& e) {
    finite = false;
    out.detail << e.what() << "; ";
  }
  const double final_rmse = t.training_rmse();
  const double secs = seconds_since(t0);
  out.require(t.global_step() == 300, "300 steps");
  out.require(finite, "finite losses");
  out.require(final_rmse < 0.5 * initial, "RMSE < 50% of initial");
  out.require(worst_param <= c.clip, "critic parameters in [-0.01, 0.01]");
  out.require(secs < 900, "runtime < 15 min");
  out.detail << "RMSE " << initial << " -> " << final_rmse << " (" << 100 * final_rmse / initial
             << "%), max |critic param| " << worst_param << ", " << secs << " s";
}

bool same_parameters(pipeline::RdfcModel& a, pipeline::RdfcModel& b) {
  const auto pa = a->named_parameters(), pb = b->named_parameters();
  for (const auto& item : pa) {
    if (!torch::equal(item.value(), pb[item.key()])) return false;
  }
  const auto ba = a->named_buffers(), bb = b->named_buffers();
  for (const auto& item : ba) {
    if (!torch::equal(item.value(), bb[item.key()])) return false;
  }
  return pa.size() == pb.size() && ba.size() == bb.size();
}

void determinism(Outcome& out) {
  const auto dir = fs::temp_directory_path() / "rdfc_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  pipeline::TrainConfig c;
  c.base_channels = 16;
  c.synth_scenes = 8;
  c.epochs = 2;
  c.lr_decay_start = 1;
  c.seed = 5;
  c.log_every = 0;
  const auto data = pipeline::training_set(c);
  const auto test = pipeline::synthetic_dataset(4, 909, 64, 48);

  pipeline::Trainer straight(c, data);
  straight.run();
  straight.save(dir / "straight.ckpt");

  pipeline::Trainer first(c, data);
  while (first.global_step() < first.steps_per_epoch()) first.step();
  first.save(dir / "epoch1.ckpt");
  auto resumed = pipeline::Trainer::resume(dir / "epoch1.ckpt", data);
  resumed.run();
  resumed.save(dir / "resumed.ckpt");

  auto a = pipeline::load_model(dir / "straight.ckpt");
  auto b = pipeline::load_model(dir / "resumed.ckpt");
  out.require(same_parameters(a.model, b.model), "parameters after resume");

  int stable = 0;
  for (auto setting : {pipeline::Setting::kA, pipeline::Setting::kB, pipeline::Setting::kC}) {
    pipeline::EvalOptions opts;
    opts.setting = setting;
    opts.seed = 17;
    const auto ja = pipeline::to_json(pipeline::evaluate(a.model, a.config, test, opts)).dump();
    const auto jb = pipeline::to_json(pipeline::evaluate(b.model, b.config, test, opts)).dump();
    const auto ja2 = pipeline::to_json(pipeline::evaluate(a.model, a.config, test, opts)).dump();
    const bool ok = ja == jb && ja == ja2;
    stable += ok;
    out.require(ok, "setting " + pipeline::to_string(setting) + " JSON");
  }
  fs::remove_all(dir);
  out.detail << straight.global_step() << " steps, resumed after " << straight.steps_per_epoch() << "; " << stable
             << "/3 settings bit-identical";
}

void property_sweeps(Outcome& out) {
  Rng rng(808);
  int delta_bad = 0, sym_bad = 0, f1_bad = 0, bp_bad = 0;
  double worst_bp = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int h = 1 + static_cast<int>(rng.below(24)), w = 1 + static_cast<int>(rng.below(24));
    auto gt = random_depth(rng, h, w, 0.3);
    gt.data()[0] = 2.0f;
    const auto pred = random_depth(rng, h, w, 0.1);
    const double d1 = metrics::delta(pred, gt, metrics::kDeltaThresholds[0]);
    const double d2 = metrics::delta(pred, gt, metrics::kDeltaThresholds[1]);
    const double d3 = metrics::delta(pred, gt, metrics::kDeltaThresholds[2]);
    delta_bad += !(0 <= d1 && d1 <= d2 && d2 <= d3 && d3 <= 100);

    const double extent = rng.uniform(0.01, 0.5);
    const auto a = oracle::random_cloud(rng, 1 + static_cast<int>(rng.below(200)), extent);
    const auto b = oracle::random_cloud(rng, 1 + static_cast<int>(rng.below(200)), extent);
    sym_bad += metrics::chamfer(a, b) != metrics::chamfer(b, a);

    const auto f = metrics::f1_score(a, b);
    for (int t = 0; t + 1 < 3; ++t) {
      f1_bad += f.precision[t] > f.precision[t + 1] || f.recall[t] > f.recall[t + 1];
    }

    const CameraIntrinsics k(rng.uniform(50, 600), rng.uniform(50, 600), rng.uniform(0, w), rng.uniform(0, h));
    const auto cloud = metrics::depth_to_pointcloud(gt, k);
    std::size_t idx = 0;
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        if (!(gt.at(r, c) > 0)) continue;
        const auto& p = cloud[idx++];
        const double u = k.fx * p.x / p.z + k.cx, v = k.fy * p.y / p.z + k.cy;
        worst_bp = std::max({worst_bp, std::abs(u - c), std::abs(v - r), std::abs(p.z - gt.at(r, c))});
      }
    }
    bp_bad += idx != cloud.size();
  }
  bp_bad += worst_bp > 1e-9;
  out.require(delta_bad == 0, "delta monotone");
  out.require(sym_bad == 0, "chamfer symmetric");
  out.require(f1_bad == 0, "f1 monotone in threshold");
  out.require(bp_bad == 0, "back-projection round trip");
  out.detail << "1000 instances each; violations delta " << delta_bad << ", chamfer " << sym_bad << ", f1 " << f1_bad
             << "; back-projection max error " << worst_bp;
}

}  // namespace

int main() {
  torch::set_num_threads(1);
  log::set_level(log::Level::kWarn);
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"metric oracle equivalence", metric_oracles},
      {"formula fidelity", formula_fidelity},
      {"gradient checks", gradient_checks},
      {"manhattan loss anchors", manhattan_anchors},
      {"pseudo-depth statistics", pseudo_statistics},
      {"training smoke", training_smoke},
      {"determinism", determinism},
      {"property sweeps", property_sweeps},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome out;
    try {
      run(out);
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail << "exception: " << e.what();
    }
    failed += !out.pass;
    std::printf("%s %s: %s\n", out.pass ? "PASS" : "FAIL", name.c_str(), out.detail.str().c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
