#pragma once

#include <cstdint>

#include <torch/torch.h>

namespace rdfc::mcn {

/// ε added to every vector norm in the cosine terms.
inline constexpr double kNormEps = 1e-8;

/// Plane class codes as stored in class tensors (see PlaneClass).
inline constexpr int64_t kOther = 0, kFloor = 1, kCeiling = 2, kWall = 3;

/// v / (|v| + ε) along dim 1 of [B, 3, H, W].
torch::Tensor unit_normals(const torch::Tensor& n);

/// -mean over valid pixels of cos(n_p, n*_p). `valid` is an optional
/// [B, 1, H, W] bool mask of pixels with a defined ground-truth normal.
/// Returns 0 when no pixel is valid.
torch::Tensor cosine_normal_loss(const torch::Tensor& n, const torch::Tensor& n_star,
                                 const torch::Tensor& valid = torch::Tensor());

struct PlaneLosses {
  torch::Tensor floor;    // -mean cos(n, v_z) over floor pixels
  torch::Tensor ceiling;  // +mean cos(n, v_z) over ceiling pixels
  torch::Tensor wall;     // +mean |cos(n, v_z)| over wall pixels
};

/// Orientation losses against v_z = (0, 0, 1). `classes` is [B, H, W] of
/// plane class codes; an empty class contributes 0.
PlaneLosses plane_orientation_losses(const torch::Tensor& n, const torch::Tensor& classes);

/// L_n + L_floor + L_ceiling + L_wall.
torch::Tensor mnm_loss(const torch::Tensor& n, const torch::Tensor& n_star, const torch::Tensor& classes,
                       const torch::Tensor& valid = torch::Tensor());

/// Pairwise Manhattan alignment loss, averaged over the batch:
///   mean_{wall x (floor u ceiling)} |cos| + mean_{floor x ceiling} cos.
/// A term whose pair count exceeds `pair_budget` is estimated from
/// `pair_budget` pairs drawn with replacement (seeded); an empty factor set
/// makes that term 0.
torch::Tensor wma_loss(const torch::Tensor& n, const torch::Tensor& classes, int64_t pair_budget,
                       std::uint64_t seed);

/// Mean |pred - target| over pixels where target > 0; 0 if there are none.
torch::Tensor masked_l1(const torch::Tensor& pred, const torch::Tensor& target);

/// mnm + lambda_l * masked L1(d_l, d_sup). Logs a warning when the
/// supervision has no valid pixel.
torch::Tensor mcn_branch_loss(const torch::Tensor& d_l, const torch::Tensor& d_sup, const torch::Tensor& mnm,
                              double lambda_l = 0.5);

}  // namespace rdfc::mcn
