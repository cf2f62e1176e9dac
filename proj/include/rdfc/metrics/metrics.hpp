#pragma once

#include <array>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "rdfc/core/types.hpp"

namespace rdfc::metrics {

/// A metric has no valid pixels or points to average over.
class UndefinedMetricError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

inline constexpr std::array<double, 3> kDeltaThresholds{1.25, 1.25 * 1.25, 1.25 * 1.25 * 1.25};
inline constexpr std::array<double, 3> kF1Thresholds{0.02, 0.03, 0.04};

// Depth-space metrics. All average over pixels where gt > 0; pred is
// treated as dense. Each throws UndefinedMetricError when gt has no valid
// pixel and ParameterError on a shape mismatch.
double rmse(const DepthMap& pred, const DepthMap& gt);
double rel(const DepthMap& pred, const DepthMap& gt);
/// Percentage of valid pixels with max(pred/gt, gt/pred) < th; th > 1.
double delta(const DepthMap& pred, const DepthMap& gt, double th);

/// One point d(v,u) * K^-1 [u, v, 1]^T per valid pixel (u = column,
/// v = row), in row-major pixel order.
PointCloud depth_to_pointcloud(const DepthMap& d, const CameraIntrinsics& k);

/// Squared nearest-neighbor distance from every point of `from` to `to`.
std::vector<double> nearest_squared_distances(const PointCloud& from, const PointCloud& to);

/// Symmetric mean squared nearest-neighbor distance (squared meters).
double chamfer(const PointCloud& a, const PointCloud& b);

struct F1Result {
  std::array<double, 3> precision{};
  std::array<double, 3> recall{};
  std::array<double, 3> fscore{};
  double f1 = 0.0;  // mean of fscore over the three thresholds
};

/// Precision/recall at each distance threshold (strict <) and the averaged F1.
F1Result f1_score(const PointCloud& pred, const PointCloud& gt);

struct MetricsReport {
  double rmse = 0.0;
  double rel = 0.0;
  std::array<double, 3> delta{};  // percent, for kDeltaThresholds
  double cd = 0.0;                // squared meters
  F1Result f1;
  std::size_t n_valid = 0;

  double cd_scaled() const { return cd * 1e4; }  // in units of 1e-4
};

/// All metrics for one prediction. Point-cloud metrics compare the full
/// prediction cloud restricted to gt-valid pixels against the gt cloud.
MetricsReport evaluate_sample(const DepthMap& pred, const DepthMap& gt, const CameraIntrinsics& k);

/// Unweighted mean of per-sample reports (n_valid is summed).
MetricsReport aggregate(const std::vector<MetricsReport>& reports);

}  // namespace rdfc::metrics
