#include <cmath>

#include "nn_test.hpp"
#include "nn_oracles.hpp"
#include "rdfc/core/random.hpp"
#include "rdfc/data/synth.hpp"
#include "rdfc/mcn/losses.hpp"
#include "rdfc/mcn/networks.hpp"
#include "rdfc/nn/convert.hpp"
#include "rdfc/pipeline/data.hpp"

using namespace rdfc;
using namespace rdfc::mcn;

namespace {

torch::Tensor normals_of(std::initializer_list<std::array<double, 3>> vs) {  // [1,3,1,N]
  std::vector<double> flat;
  for (int ch = 0; ch < 3; ++ch) {
    for (const auto& v : vs) flat.push_back(v[ch]);
  }
  return torch::tensor(flat, torch::kDouble).view({1, 3, 1, static_cast<int64_t>(vs.size())});
}

torch::Tensor uniform_normals(std::array<double, 3> v, int64_t h, int64_t w) {
  return torch::tensor(std::vector<double>(v.begin(), v.end()), torch::kDouble).view({1, 3, 1, 1}).expand({1, 3, h, w}).clone();
}

torch::Tensor classes_of(int64_t code, int64_t h, int64_t w) { return torch::full({1, h, w}, code, torch::kUInt8); }

double val(const torch::Tensor& t) { return t.item<double>(); }

// The 1e-8 norm guard shifts exact cosines by ~1e-8.
bool near(double a, double b, double tol = 1e-6) { return std::abs(a - b) <= tol; }

torch::Tensor random_classes(Rng& rng, int64_t b, int64_t h, int64_t w) {
  std::vector<std::uint8_t> v(static_cast<std::size_t>(b * h * w));
  for (auto& c : v) c = static_cast<std::uint8_t>(rng.below(4));
  return torch::from_blob(v.data(), {b, h, w}, torch::kUInt8).clone();
}

// Exhaustive double sum over all class pairs, one image, plain loops.
double wma_oracle(const torch::Tensor& n, const torch::Tensor& classes) {
  const auto h = n.size(2), w = n.size(3);
  std::vector<std::array<double, 3>> floor, ceiling, wall;
  for (int64_t r = 0; r < h; ++r) {
    for (int64_t c = 0; c < w; ++c) {
      std::array<double, 3> v{};
      double norm = 0;
      for (int k = 0; k < 3; ++k) {
        v[k] = n[0][k][r][c].item<double>();
        norm += v[k] * v[k];
      }
      for (auto& x : v) x /= std::sqrt(norm) + kNormEps;
      switch (classes[0][r][c].item<int>()) {
        case kFloor: floor.push_back(v); break;
        case kCeiling: ceiling.push_back(v); break;
        case kWall: wall.push_back(v); break;
        default: break;
      }
    }
  }
  auto dot = [](const auto& a, const auto& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; };
  auto horizontal = floor;
  horizontal.insert(horizontal.end(), ceiling.begin(), ceiling.end());
  double t1 = 0, t2 = 0;
  if (!wall.empty() && !horizontal.empty()) {
    for (const auto& a : wall) {
      for (const auto& b : horizontal) t1 += std::abs(dot(a, b));
    }
    t1 /= static_cast<double>(wall.size() * horizontal.size());
  }
  if (!floor.empty() && !ceiling.empty()) {
    for (const auto& a : floor) {
      for (const auto& b : ceiling) t2 += dot(a, b);
    }
    t2 /= static_cast<double>(floor.size() * ceiling.size());
  }
  return t1 + t2;
}

struct SceneTensors {
  torch::Tensor normals, classes;
};

SceneTensors scene_tensors(const data::SynthSceneSpec& spec) {
  const auto s = data::synth_scene(spec, 0);
  return {nn::to_tensor(*s.gt_normals).to(torch::kDouble), nn::class_tensor(*s.seg)};
}

}  // namespace

TEST_CASE("cosine_normal_loss examples") {
  Rng rng(1);
  auto n = torch::randn({1, 3, 4, 4}, torch::kDouble);
  n = n / n.norm(2, 1, true);
  CHECK(near(val(cosine_normal_loss(n, n)), -1.0));
  CHECK(near(val(cosine_normal_loss(n, -n)), 1.0));
  CHECK(near(val(cosine_normal_loss(normals_of({{1, 0, 0}, {1, 0, 0}}), normals_of({{1, 0, 0}, {0, 1, 0}}))), -0.5));
}

TEST_CASE("cosine_normal_loss excludes pixels without a ground-truth normal") {
  auto n = normals_of({{1, 0, 0}, {1, 0, 0}, {0, 0, 1}});
  auto star = normals_of({{1, 0, 0}, {0, 1, 0}, {0, 0, -1}});
  auto valid = torch::tensor({true, true, false}).view({1, 1, 1, 3});
  CHECK(near(val(cosine_normal_loss(n, star, valid)), -0.5));
  CHECK(val(cosine_normal_loss(n, star, torch::zeros({1, 1, 1, 3}, torch::kBool))) == 0.0);
}

TEST_CASE("zero-norm predictions stay finite") {
  auto n = torch::zeros({1, 3, 2, 2}, torch::kDouble).requires_grad_(true);
  auto star = uniform_normals({0, 0, 1}, 2, 2);
  auto loss = mnm_loss(n, star, classes_of(kWall, 2, 2)) + wma_loss(n, classes_of(kFloor, 2, 2), 100, 0);
  loss.backward();
  CHECK(std::isfinite(val(loss)));
  CHECK(torch::isfinite(n.grad()).all().item<bool>());
}

TEST_CASE("plane orientation examples") {
  CHECK(near(val(plane_orientation_losses(uniform_normals({0, 0, 1}, 3, 3), classes_of(kFloor, 3, 3)).floor), -1.0));
  CHECK(near(val(plane_orientation_losses(uniform_normals({0, 0, -1}, 3, 3), classes_of(kCeiling, 3, 3)).ceiling), -1.0));
  CHECK(val(plane_orientation_losses(uniform_normals({1, 0, 0}, 3, 3), classes_of(kWall, 3, 3)).wall) == 0.0);

  const auto empty = plane_orientation_losses(uniform_normals({0, 1, 0}, 3, 3), classes_of(kOther, 3, 3));
  CHECK(val(empty.floor) == 0.0);
  CHECK(val(empty.ceiling) == 0.0);
  CHECK(val(empty.wall) == 0.0);
}

TEST_CASE("mnm_loss on synthetic rooms") {
  data::SynthSceneSpec room;  // floor, ceiling and walls all in view
  const auto t = scene_tensors(room);
  const auto cls = t.classes.to(torch::kLong);
  REQUIRE((cls == kFloor).any().item<bool>());
  REQUIRE((cls == kCeiling).any().item<bool>());
  REQUIRE((cls == kWall).any().item<bool>());
  CHECK(near(val(mnm_loss(t.normals, t.normals, t.classes)), -3.0));

  data::SynthSceneSpec tall;
  tall.room_size.z = 10.0;  // ceiling far outside the vertical field of view
  const auto u = scene_tensors(tall);
  REQUIRE_FALSE((u.classes.to(torch::kLong) == kCeiling).any().item<bool>());
  CHECK(near(val(mnm_loss(u.normals, u.normals, u.classes)), -2.0));

  const auto up = uniform_normals({0, 0, 1}, 4, 5);
  CHECK(near(val(mnm_loss(up, up, classes_of(kFloor, 4, 5))), -2.0));
}

TEST_CASE("wma_loss examples") {
  // columns: floor, floor, ceiling, wall, wall
  auto cls = torch::tensor({1, 1, 2, 3, 3}, torch::kUInt8).view({1, 1, 5});
  auto manhattan = normals_of({{0, 0, 1}, {0, 0, 1}, {0, 0, -1}, {1, 0, 0}, {0, 1, 0}});
  CHECK(near(val(wma_loss(manhattan, cls, 1000, 0)), -1.0));
  auto same = uniform_normals({0.3, -0.2, 0.9}, 1, 5);
  CHECK(near(val(wma_loss(same, cls, 1000, 0)), 2.0));

  auto toy = torch::randn({1, 3, 2, 2}, torch::kDouble);
  auto toy_cls = torch::tensor({1, 2, 3, 3}, torch::kUInt8).view({1, 2, 2});
  CHECK(std::abs(val(wma_loss(toy, toy_cls, 16, 0)) - wma_oracle(toy, toy_cls)) < 1e-12);
}

TEST_CASE("wma_loss equals the exhaustive sum whenever the budget covers every pair") {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    auto n = torch::randn({1, 3, 5, 6}, torch::kDouble);
    auto cls = random_classes(rng, 1, 5, 6);
    CHECK(std::abs(val(wma_loss(n, cls, 1 << 20, 0)) - wma_oracle(n, cls)) < 1e-12);
  }
}

TEST_CASE("wma_loss pair sampling is seeded and unbiased") {
  Rng rng(4);
  auto n = torch::randn({1, 3, 16, 16}, torch::kDouble);
  auto cls = random_classes(rng, 1, 16, 16);
  const double exact = wma_oracle(n, cls);
  CHECK(val(wma_loss(n, cls, 500, 7)) == val(wma_loss(n, cls, 500, 7)));
  CHECK(val(wma_loss(n, cls, 500, 7)) != val(wma_loss(n, cls, 500, 8)));
  CHECK(std::abs(val(wma_loss(n, cls, 200000, 1)) - exact) < 0.01);
}

TEST_CASE("wma_loss averages images of a batch") {
  Rng rng(5);
  auto n = torch::randn({2, 3, 4, 4}, torch::kDouble);
  auto cls = random_classes(rng, 2, 4, 4);
  const double want = 0.5 * (wma_oracle(n.narrow(0, 0, 1), cls.narrow(0, 0, 1)) +
                             wma_oracle(n.narrow(0, 1, 1), cls.narrow(0, 1, 1)));
  CHECK(std::abs(val(wma_loss(n, cls, 1 << 20, 0)) - want) < 1e-12);
}

TEST_CASE("loss ranges on random normals") {
  Rng rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    auto n = torch::randn({1, 3, 4, 4}, torch::kDouble), star = torch::randn({1, 3, 4, 4}, torch::kDouble);
    auto cls = random_classes(rng, 1, 4, 4);
    const auto p = plane_orientation_losses(n, cls);
    const double ln = val(cosine_normal_loss(n, star)), wma = val(wma_loss(n, cls, 64, trial));
    CHECK(ln >= -1.0);
    CHECK(ln <= 1.0);
    CHECK(std::abs(val(p.floor)) <= 1.0);
    CHECK(std::abs(val(p.ceiling)) <= 1.0);
    CHECK(val(p.wall) >= 0.0);
    CHECK(val(p.wall) <= 1.0);
    CHECK(wma >= -1.0);
    CHECK(wma <= 2.0);
  }
}

TEST_CASE("gradients of the normal losses match finite differences on 8x8 inputs") {
  Rng rng(7);
  torch::manual_seed(7);
  const auto star = torch::randn({1, 3, 8, 8}, torch::kDouble);
  const auto cls = random_classes(rng, 1, 8, 8);
  const auto n0 = torch::randn({1, 3, 8, 8}, torch::kDouble);
  const std::vector<std::pair<const char*, std::function<torch::Tensor(const torch::Tensor&)>>> losses{
      {"L_n", [&](const torch::Tensor& n) { return cosine_normal_loss(n, star); }},
      {"L_floor", [&](const torch::Tensor& n) { return plane_orientation_losses(n, cls).floor; }},
      {"L_ceiling", [&](const torch::Tensor& n) { return plane_orientation_losses(n, cls).ceiling; }},
      {"L_wall", [&](const torch::Tensor& n) { return plane_orientation_losses(n, cls).wall; }},
      {"wma exhaustive", [&](const torch::Tensor& n) { return wma_loss(n, cls, 1 << 20, 0); }},
      {"wma sampled", [&](const torch::Tensor& n) { return wma_loss(n, cls, 256, 3); }},
  };
  for (const auto& [name, f] : losses) {
    const auto r = oracle::grad_check(f, n0);
    INFO(name);
    CHECK(r.rel_error < 1e-4);
    CHECK(r.norm > 0);
  }
}

TEST_CASE("masked L1 ignores holes") {
  auto sup = torch::tensor({2.0, 0.0, 3.0, 0.0}, torch::kDouble).view({1, 1, 2, 2});
  auto d = torch::tensor({2.5, 7.0, 2.0, 1.0}, torch::kDouble).view({1, 1, 2, 2});
  const double base = val(masked_l1(d, sup));
  CHECK(base == doctest::Approx(0.75));
  auto moved = d.clone();
  moved[0][0][0][1] = 100.0;
  moved[0][0][1][1] = -4.0;
  CHECK(val(masked_l1(moved, sup)) == base);
  CHECK(val(masked_l1(d, torch::zeros_like(sup))) == 0.0);
}

TEST_CASE("mcn_branch_loss examples") {
  auto sup = torch::tensor({1.0, 0.0, 2.0}, torch::kDouble).view({1, 1, 1, 3});
  auto zero = torch::zeros({}, torch::kDouble);
  CHECK(val(mcn_branch_loss(sup, sup, zero)) == 0.0);
  CHECK(near(val(mcn_branch_loss(sup + 0.2, sup, zero, 0.5)), 0.1, 1e-12));
  CHECK(val(mcn_branch_loss(sup, torch::zeros_like(sup), torch::full({}, -1.5, torch::kDouble))) == -1.5);
}

TEST_CASE("MCN shapes: 304x228 and 64x64 inputs") {
  torch::NoGradGuard no_grad;
  torch::manual_seed(0);
  McnNet net(64, 10.0);
  net->eval();
  auto d = torch::rand({1, 1, 228, 304}) * 5;
  auto n = torch::randn({1, 3, 228, 304});
  const auto out = net->forward(d, n);
  CHECK(has_shape(out.d_l, {1, 1, 228, 304}));
  CHECK(has_shape(out.c_l, {1, 1, 228, 304}));
  REQUIRE(out.latents.size() == 4);
  CHECK(has_shape(out.latents[0], {1, 512, 8, 10}));
  CHECK(torch::isfinite(out.d_l).all().item<bool>());
  CHECK(torch::isfinite(out.c_l).all().item<bool>());
  CHECK((out.d_l >= 0).all().item<bool>());

  const auto small = net->forward(torch::rand({1, 1, 64, 64}), torch::randn({1, 3, 64, 64}));
  CHECK(has_shape(small.latents[0], {1, 512, 2, 2}));
  for (int s = 1; s < 4; ++s) CHECK(small.latents[s].size(2) == 2 * small.latents[s - 1].size(2));
}

TEST_CASE("normal generator output is unit length and deterministic in eval mode") {
  torch::manual_seed(1);
  for (auto input : {NormalInput::kRgbd, NormalInput::kRgb}) {
    NormalGenerator ng(input, 8);
    ng->eval();
    torch::NoGradGuard no_grad;
    auto rgb = torch::rand({2, 3, 37, 51}), depth = torch::rand({2, 1, 37, 51});
    const auto n = ng->forward(rgb, depth);
    CHECK(has_shape(n, {2, 3, 37, 51}));
    CHECK(((n.norm(2, 1) - 1).abs() < 1e-4).all().item<bool>());
    CHECK(torch::equal(n, ng->forward(rgb, depth)));
  }
}

TEST_CASE("normal generator learns synthetic normals to within 10 degrees") {
  torch::manual_seed(2);
  const auto train = pipeline::synthetic_dataset(512, 11, 64, 48);
  const auto test = pipeline::synthetic_dataset(8, 12, 64, 48);
  auto stack = [](const std::vector<SampleRecord>& set) {
    std::vector<torch::Tensor> rgb, depth, normals;
    for (const auto& s : set) {
      rgb.push_back(nn::to_tensor(s.rgb));
      depth.push_back(nn::to_tensor(s.raw_depth) / 10.0);
      normals.push_back(nn::to_tensor(*s.gt_normals));
    }
    return std::array<torch::Tensor, 3>{torch::cat(rgb), torch::cat(depth), torch::cat(normals)};
  };
  const auto [rgb, depth, star] = stack(train);
  NormalGenerator ng(NormalInput::kRgbd, 16);
  const double lr = 2e-3;
  const int steps = 1200, batch = 8, batches = 512 / batch;
  torch::optim::Adam opt(ng->parameters(), torch::optim::AdamOptions(lr));
  auto set_lr = [&](double v) {
    for (auto& g : opt.param_groups()) static_cast<torch::optim::AdamOptions&>(g.options()).lr(v);
  };
  for (int step = 0; step < steps; ++step) {
    if (step == steps * 6 / 10) set_lr(lr * 0.2);
    if (step == steps * 85 / 100) set_lr(lr * 0.04);
    const auto idx = torch::arange(batch * (step % batches), batch * (step % batches) + batch);
    auto loss = cosine_normal_loss(ng->forward(rgb.index_select(0, idx), depth.index_select(0, idx)),
                                   star.index_select(0, idx));
    opt.zero_grad();
    loss.backward();
    opt.step();
  }
  ng->eval();
  torch::NoGradGuard no_grad;
  const auto [trgb, tdepth, tstar] = stack(test);
  auto cos = (ng->forward(trgb, tdepth) * tstar).sum(1).clamp(-1.0, 1.0);
  const double mean_deg = torch::acos(cos).mean().item<double>() * 180.0 / M_PI;
  MESSAGE("held-out mean angular error: " << mean_deg << " deg");
  CHECK(mean_deg < 10.0);
}
