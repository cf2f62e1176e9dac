#include "rdfc/mcn/losses.hpp"

#include "rdfc/core/log.hpp"
#include "rdfc/core/random.hpp"

namespace rdfc::mcn {

namespace {

torch::Tensor zero_like_scalar(const torch::Tensor& ref) { return torch::zeros({}, ref.options()); }

// Mean of `values` over `mask` (same shape, bool); 0 when the mask is empty.
torch::Tensor masked_mean(const torch::Tensor& values, const torch::Tensor& mask) {
  const auto count = mask.sum().item<int64_t>();
  if (count == 0) return zero_like_scalar(values);
  return values.masked_select(mask).sum() / static_cast<double>(count);
}

}  // namespace

torch::Tensor unit_normals(const torch::Tensor& n) {
  return n / (n.norm(2, /*dim=*/1, /*keepdim=*/true) + kNormEps);
}

torch::Tensor cosine_normal_loss(const torch::Tensor& n, const torch::Tensor& n_star, const torch::Tensor& valid) {
  TORCH_CHECK(n.sizes() == n_star.sizes(), "cosine_normal_loss: shape mismatch");
  auto cos = (unit_normals(n) * unit_normals(n_star)).sum(1, /*keepdim=*/true);  // [B,1,H,W]
  if (!valid.defined()) return -cos.mean();
  return -masked_mean(cos, valid.to(torch::kBool));
}

PlaneLosses plane_orientation_losses(const torch::Tensor& n, const torch::Tensor& classes) {
  auto cos_z = unit_normals(n).select(1, 2);  // [B,H,W]
  auto cls = classes.to(torch::kLong);
  return {-masked_mean(cos_z, cls == kFloor), masked_mean(cos_z, cls == kCeiling),
          masked_mean(cos_z.abs(), cls == kWall)};
}

torch::Tensor mnm_loss(const torch::Tensor& n, const torch::Tensor& n_star, const torch::Tensor& classes,
                       const torch::Tensor& valid) {
  auto planes = plane_orientation_losses(n, classes);
  return cosine_normal_loss(n, n_star, valid) + planes.floor + planes.ceiling + planes.wall;
}

namespace {

// Mean over (a, b) pairs of f(cos(u_a, u_b)); u_* are [k, 3] unit rows.
torch::Tensor pair_term(const torch::Tensor& ua, const torch::Tensor& ub, bool absolute, int64_t budget, Rng& rng) {
  const int64_t na = ua.size(0), nb = ub.size(0);
  if (na == 0 || nb == 0) return zero_like_scalar(ua);
  torch::Tensor cos;
  if (static_cast<double>(na) * static_cast<double>(nb) <= static_cast<double>(budget)) {
    cos = torch::mm(ua, ub.t());
  } else {
    std::vector<int64_t> ia(static_cast<std::size_t>(budget)), ib(static_cast<std::size_t>(budget));
    for (int64_t i = 0; i < budget; ++i) {
      ia[static_cast<std::size_t>(i)] = static_cast<int64_t>(rng.below(static_cast<std::uint64_t>(na)));
      ib[static_cast<std::size_t>(i)] = static_cast<int64_t>(rng.below(static_cast<std::uint64_t>(nb)));
    }
    auto ta = torch::tensor(ia, torch::kLong), tb = torch::tensor(ib, torch::kLong);
    cos = (ua.index_select(0, ta) * ub.index_select(0, tb)).sum(1);
  }
  return absolute ? cos.abs().mean() : cos.mean();
}

}  // namespace

torch::Tensor wma_loss(const torch::Tensor& n, const torch::Tensor& classes, int64_t pair_budget, std::uint64_t seed) {
  TORCH_CHECK(pair_budget > 0, "wma_loss: pair_budget must be positive");
  auto u = unit_normals(n);  // [B,3,H,W]
  auto cls = classes.to(torch::kLong);
  const int64_t batch = n.size(0);
  Rng rng(derive_seed(seed, {0x776d61}));
  auto total = zero_like_scalar(n);
  for (int64_t b = 0; b < batch; ++b) {
    auto rows = u[b].reshape({3, -1}).t();  // [HW,3]
    auto c = cls[b].reshape({-1});
    auto pick = [&](torch::Tensor m) { return rows.index({m}); };
    auto walls = pick(c == kWall);
    auto floors = pick(c == kFloor);
    auto ceilings = pick(c == kCeiling);
    auto horizontal = torch::cat({floors, ceilings}, 0);
    total = total + pair_term(walls, horizontal, /*absolute=*/true, pair_budget, rng) +
            pair_term(floors, ceilings, /*absolute=*/false, pair_budget, rng);
  }
  return total / static_cast<double>(batch);
}

torch::Tensor masked_l1(const torch::Tensor& pred, const torch::Tensor& target) {
  TORCH_CHECK(pred.sizes() == target.sizes(), "masked_l1: shape mismatch");
  return masked_mean((pred - target).abs(), target > 0);
}

torch::Tensor mcn_branch_loss(const torch::Tensor& d_l, const torch::Tensor& d_sup, const torch::Tensor& mnm,
                              double lambda_l) {
  if ((d_sup > 0).sum().item<int64_t>() == 0) {
    log::warn("mcn_branch_loss: supervision has no valid pixel; L1 term is 0");
  }
  return mnm + lambda_l * masked_l1(d_l, d_sup);
}

}  // namespace rdfc::mcn
