#include <cmath>

#include "nn_test.hpp"
#include "nn_oracles.hpp"
#include "rdfc/gan/losses.hpp"
#include "rdfc/gan/networks.hpp"

using namespace rdfc;
using namespace rdfc::gan;

namespace {

std::vector<torch::Tensor> random_latents(DepthGenerator& g, int64_t batch, int64_t h, int64_t w,
                                          torch::Dtype dtype = torch::kFloat) {
  std::vector<torch::Tensor> out;
  for (int s = 0; s < nn::kFusionStages; ++s) {
    const int64_t stride = 32 >> s;
    out.push_back(
        torch::randn({batch, g->net->stage_channels(s), h / stride, w / stride}, torch::TensorOptions().dtype(dtype)));
  }
  return out;
}

torch::Tensor scalar(double v) { return torch::full({}, v, torch::kDouble); }

double value(const torch::Tensor& t) { return t.item<double>(); }

void set_requires_grad(const std::vector<torch::Tensor>& params, bool on) {
  for (auto p : params) p.requires_grad_(on);
}

std::vector<torch::Tensor> concat(std::vector<torch::Tensor> a, const std::vector<torch::Tensor>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

TEST_CASE("depth generator: shapes, non-negative depth, live fusion") {
  torch::manual_seed(1);
  DepthGenerator g(8, 10.0);
  g->eval();
  torch::NoGradGuard no_grad;
  const auto rgb = torch::rand({2, 3, 64, 64});
  const auto latents = random_latents(g, 2, 64, 64);
  const auto out = g(rgb, latents);
  CHECK(has_shape(out.d_f, {2, 1, 64, 64}));
  CHECK(has_shape(out.c_f, {2, 1, 64, 64}));
  CHECK((out.d_f >= 0).all().item<bool>());
  CHECK(torch::isfinite(out.c_f).all().item<bool>());

  std::vector<torch::Tensor> zeros;
  for (const auto& z : latents) zeros.push_back(torch::zeros_like(z));
  CHECK((g(rgb, zeros).d_f - out.d_f).abs().max().item<double>() > 1e-6);

  // Large inputs still yield non-negative depth.
  const auto big = g(rgb * 100 - 50, random_latents(g, 2, 64, 64)).d_f;
  CHECK((big >= 0).all().item<bool>());
  CHECK(torch::isfinite(big).all().item<bool>());
}

TEST_CASE("depth generator rejects mismatched latents") {
  DepthGenerator g(8, 10.0);
  const auto rgb = torch::rand({1, 3, 64, 64});
  auto latents = random_latents(g, 1, 64, 64);
  CHECK_THROWS_AS(g(rgb, std::vector<torch::Tensor>(latents.begin(), latents.end() - 1)), ParameterError);
  latents[2] = torch::randn({1, g->net->stage_channels(2), 4, 4});
  CHECK_THROWS_AS(g(rgb, latents), ParameterError);
  latents = random_latents(g, 1, 64, 64);
  latents[0] = torch::randn({1, g->net->stage_channels(0) + 1, 2, 2});
  CHECK_THROWS_AS(g(rgb, latents), ParameterError);
}

TEST_CASE("rgb generator output lies in [0, 1] and is deterministic in eval mode") {
  torch::manual_seed(2);
  RgbGenerator g_r(8, 10.0);
  g_r->eval();
  torch::NoGradGuard no_grad;
  const auto d = torch::rand({2, 1, 48, 64}) * 20;
  const auto a = g_r(d), b = g_r(d);
  CHECK(has_shape(a, {2, 3, 48, 64}));
  CHECK((a >= 0).all().item<bool>());
  CHECK((a <= 1).all().item<bool>());
  CHECK(torch::equal(a, b));
  const auto extreme = g_r(torch::full({1, 1, 48, 64}, 1e4));
  CHECK((extreme >= 0).all().item<bool>());
  CHECK((extreme <= 1).all().item<bool>());
}

TEST_CASE("critics produce an 8x8 patch grid and respond to their inputs") {
  torch::manual_seed(3);
  DepthCritic d(8, 10.0);
  RgbCritic d_r(8);
  torch::NoGradGuard no_grad;
  const auto depth = torch::rand({2, 1, 64, 64}) * 5, rgb = torch::rand({2, 3, 64, 64});
  const auto s = d(depth, rgb);
  CHECK(has_shape(s, {2, 1, 8, 8}));
  CHECK(torch::isfinite(s).all().item<bool>());
  CHECK((d(depth, torch::rand({2, 3, 64, 64})) - s).abs().max().item<double>() > 0);
  CHECK((d(depth * 0.5, rgb) - s).abs().max().item<double>() > 0);

  const auto sr = d_r(rgb);
  CHECK(has_shape(sr, {2, 1, 8, 8}));
  CHECK(torch::isfinite(sr).all().item<bool>());
  CHECK((d_r(torch::rand({2, 3, 64, 64})) - sr).abs().max().item<double>() > 0);
}

TEST_CASE("score reduction") {
  const auto s = torch::arange(8, torch::kDouble).view({2, 1, 2, 2});
  CHECK(value(reduce_scores(s)) == doctest::Approx(3.5));
  CHECK(value(reduce_scores(s, ScoreReduction::kSum)) == doctest::Approx(14.0));
}

TEST_CASE("gan losses follow their definitions") {
  const auto zero = gan_losses({scalar(0), scalar(0), scalar(0), scalar(0)});
  for (const auto& t : {zero.d, zero.g, zero.dr, zero.gr}) CHECK(value(t) == 0.0);

  const auto l = gan_losses({scalar(2), scalar(5), scalar(-1), scalar(0.5)});
  CHECK(value(l.d) == -3.0);
  CHECK(value(l.g) == -2.0);
  CHECK(value(l.dr) == -1.5);
  CHECK(value(l.gr) == 1.0);
}

TEST_CASE("one critic descent step lowers L_D on a fixed batch") {
  torch::manual_seed(4);
  DepthCritic d(8, 10.0);
  const auto rgb = torch::rand({2, 3, 64, 64});
  const auto real = torch::rand({2, 1, 64, 64}) * 5, fake = torch::rand({2, 1, 64, 64}) * 5;
  auto l_d = [&] { return gan_losses({reduce_scores(d(fake, rgb)), reduce_scores(d(real, rgb)), scalar(0), scalar(0)}).d; };
  torch::optim::SGD opt(d->parameters(), torch::optim::SGDOptions(1e-3));
  const auto before = l_d();
  opt.zero_grad();
  before.backward();
  opt.step();
  const auto after = l_d();
  CHECK(value(after) < value(before));
}

TEST_CASE("cycle loss examples") {
  torch::manual_seed(5);
  const auto rgb = torch::rand({2, 3, 8, 8}), d_gt = torch::rand({2, 1, 8, 8}) * 3 + 0.5;
  CHECK(value(cycle_loss(rgb, rgb, d_gt, d_gt)) == 0.0);
  CHECK(value(cycle_loss(rgb + 0.1, rgb, d_gt, d_gt)) == doctest::Approx(0.1).epsilon(1e-6));

  auto holes = d_gt.clone();
  holes.index_put_({0, 0, 0}, 0.0);
  CHECK(value(cycle_loss(rgb, rgb, d_gt + 1e3 * (holes == 0), holes)) == doctest::Approx(0.0));

  for (int i = 0; i < 20; ++i) {
    CHECK(value(cycle_loss(torch::rand({1, 3, 4, 4}), torch::rand({1, 3, 4, 4}), torch::randn({1, 1, 4, 4}),
                           torch::rand({1, 1, 4, 4}))) >= 0.0);
  }
}

TEST_CASE("rdfc branch loss sums its components") {
  CHECK(value(rdfc_branch_loss({scalar(0), scalar(0), scalar(0), scalar(0)}, scalar(0))) == 0.0);
  CHECK(value(rdfc_branch_loss({scalar(1), scalar(-1), scalar(0.5), scalar(-0.5)}, scalar(2))) == 2.0);
}

TEST_CASE("loss routing: critics see only L_D + L_Dr, generators never see the critic terms") {
  torch::manual_seed(6);
  DepthGenerator g(4, 10.0);
  RgbGenerator g_r(4, 10.0);
  DepthCritic d(4, 10.0);
  RgbCritic d_r(4);
  for (torch::nn::Module* m : std::vector<torch::nn::Module*>{g.get(), g_r.get(), d.get(), d_r.get()}) {
    m->to(torch::kDouble);
    m->eval();  // batch statistics would couple the finite differences across samples
  }
  const auto rgb = torch::rand({1, 3, 32, 32}, torch::kDouble);
  const auto d_gt = torch::rand({1, 1, 32, 32}, torch::kDouble) * 4 + 0.5;
  const auto latents = random_latents(g, 1, 32, 32, torch::kDouble);

  // With `routed`, the critic terms see detached fakes and the generator
  // terms see frozen critics.
  struct Terms {
    torch::Tensor d, g, dr, gr, cycle;
  };
  auto terms = [&](bool routed) {
    const auto fake_depth = g(rgb, latents).d_f;
    const auto fake_rgb = g_r(d_gt);
    auto dd = [&](const torch::Tensor& x) { return reduce_scores(d(x, rgb)); };
    auto rr = [&](const torch::Tensor& x) { return reduce_scores(d_r(x)); };
    const auto crit = gan_losses({dd(routed ? fake_depth.detach() : fake_depth), dd(d_gt),
                                  rr(routed ? fake_rgb.detach() : fake_rgb), rr(rgb)});
    if (routed) set_requires_grad(concat(d->parameters(), d_r->parameters()), false);
    const auto gen = gan_losses({dd(fake_depth), dd(d_gt), rr(fake_rgb), rr(rgb)});
    if (routed) set_requires_grad(concat(d->parameters(), d_r->parameters()), true);
    const auto cyc = cycle_loss(g_r(fake_depth), rgb, g(fake_rgb, latents).d_f, d_gt);
    return Terms{crit.d, gen.g, crit.dr, gen.gr, cyc};
  };

  const auto t = terms(true);
  const auto total = rdfc_branch_loss({t.d, t.g, t.dr, t.gr}, t.cycle);
  const auto critic_params = concat(d->parameters(), d_r->parameters());
  const auto gen_params = concat(g->parameters(), g_r->parameters());
  auto grads = torch::autograd::grad({total}, concat(critic_params, gen_params), {}, false, false, true);

  // Finite differences of a scalar objective w.r.t. one parameter entry.
  auto fd = [&](torch::Tensor p, int64_t i, const std::function<double()>& f) {
    torch::NoGradGuard no_grad;
    auto flat = p.view({-1});
    const double v = flat[i].item<double>(), h = 1e-6;
    flat[i] = v + h;
    const double up = f();
    flat[i] = v - h;
    const double down = f();
    flat[i] = v;
    return (up - down) / (2 * h);
  };
  auto critic_objective = [&] {
    const auto u = terms(false);
    return value(u.d + u.dr);
  };
  auto generator_objective = [&] {
    const auto u = terms(false);
    return value(u.g + u.gr + u.cycle);
  };
  auto unrouted = [&] {
    const auto u = terms(false);
    return value(u.d + u.g + u.dr + u.gr + u.cycle);
  };

  torch::manual_seed(7);
  double critic_gap = 0;
  for (std::size_t k = 0; k < critic_params.size(); k += 3) {
    const auto p = critic_params[k];
    const int64_t i = torch::randint(p.numel(), {1}).item<int64_t>();
    const double got = grads[k].defined() ? grads[k].view({-1})[i].item<double>() : 0.0;
    const double want = fd(p, i, critic_objective);
    CHECK(std::abs(got - want) <= 1e-5 * std::max(1.0, std::abs(want)));
    critic_gap = std::max(critic_gap, std::abs(fd(p, i, unrouted) - want));
  }
  // The unrouted sum does depend on the critics through L_G and L_Gr.
  CHECK(critic_gap > 1e-6);

  for (std::size_t k = 0; k < gen_params.size(); k += 7) {
    const auto p = gen_params[k];
    const int64_t i = torch::randint(p.numel(), {1}).item<int64_t>();
    const auto& gk = grads[critic_params.size() + k];
    const double got = gk.defined() ? gk.view({-1})[i].item<double>() : 0.0;
    const double want = fd(p, i, generator_objective);
    CHECK(std::abs(got - want) <= 1e-5 * std::max(1.0, std::abs(want)));
  }

  // The critic losses alone carry no gradient into the generators.
  const auto crit_only = torch::autograd::grad({t.d + t.dr}, gen_params, {}, true, false, true);
  for (const auto& gk : crit_only) CHECK((!gk.defined() || gk.abs().max().item<double>() == 0.0));
  // And the generator losses carry none into the critics.
  const auto t2 = terms(true);
  const auto gen_only = torch::autograd::grad({t2.g + t2.gr + t2.cycle}, critic_params, {}, true, false, true);
  for (const auto& gk : gen_only) CHECK((!gk.defined() || gk.abs().max().item<double>() == 0.0));
}

TEST_CASE("weight clipping bounds every critic parameter") {
  torch::manual_seed(8);
  DepthCritic d(8, 10.0);
  {
    torch::NoGradGuard no_grad;
    for (auto& p : d->parameters()) p.normal_(0.0, 0.5);
  }
  std::vector<torch::Tensor> before;
  for (const auto& p : d->parameters()) before.push_back(p.detach().clone());
  clip_weights(*d, 0.01);
  const auto params = d->parameters();
  for (std::size_t k = 0; k < params.size(); ++k) {
    CHECK(params[k].abs().max().item<double>() <= 0.01);
    const auto inside = before[k].abs() <= 0.01;
    CHECK(torch::equal(params[k].masked_select(inside), before[k].masked_select(inside)));
  }
}

TEST_CASE("gradient penalty of a linear critic") {
  const auto w = torch::randn({1, 2, 3, 3}, torch::kDouble);
  auto critic = [&](const torch::Tensor& x) { return (x * w).sum({1, 2, 3}); };
  const auto real = torch::randn({4, 2, 3, 3}, torch::kDouble), fake = torch::randn({4, 2, 3, 3}, torch::kDouble);
  const double norm = w.norm().item<double>();
  CHECK(value(gradient_penalty(critic, real, fake, 10.0, 1)) ==
        doctest::Approx(10.0 * (norm - 1) * (norm - 1)).epsilon(1e-12));
  const auto unit = w / norm;
  auto unit_critic = [&](const torch::Tensor& x) { return (x * unit).sum({1, 2, 3}); };
  CHECK(std::abs(value(gradient_penalty(unit_critic, real, fake, 10.0, 1))) < 1e-20);
}

TEST_CASE("gradient penalty is seeded and differentiable w.r.t. the critic") {
  torch::manual_seed(9);
  RgbCritic d_r(4);
  const auto real = torch::rand({2, 3, 32, 32}), fake = torch::rand({2, 3, 32, 32});
  auto critic = [&](const torch::Tensor& x) { return d_r(x); };
  const auto a = gradient_penalty(critic, real, fake, 10.0, 5);
  const auto b = gradient_penalty(critic, real, fake, 10.0, 5);
  CHECK(value(a) == value(b));
  CHECK(value(a) >= 0.0);
  a.backward();
  double g = 0;
  for (const auto& p : d_r->parameters()) {
    if (p.grad().defined()) g += p.grad().abs().sum().item<double>();
  }
  CHECK(g > 0);
}
