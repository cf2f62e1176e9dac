#include "rdfc/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rdfc/metrics/kdtree.hpp"

namespace rdfc::metrics {

namespace {

void check_pair(const DepthMap& pred, const DepthMap& gt) {
  if (!pred.same_shape(gt)) throw ParameterError("metrics: prediction and ground truth shapes differ");
}

template <typename F>
std::pair<double, std::size_t> sum_valid(const DepthMap& pred, const DepthMap& gt, F&& term, const char* name) {
  check_pair(pred, gt);
  double sum = 0.0;
  std::size_t n = 0;
  auto p = pred.data();
  auto g = gt.data();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!(g[i] > 0.0f)) continue;
    sum += term(static_cast<double>(p[i]), static_cast<double>(g[i]));
    ++n;
  }
  if (n == 0) throw UndefinedMetricError(std::string(name) + ": ground truth has no valid pixel");
  return {sum, n};
}

}  // namespace

double rmse(const DepthMap& pred, const DepthMap& gt) {
  auto [sum, n] = sum_valid(
      pred, gt, [](double p, double g) { return (p - g) * (p - g); }, "rmse");
  return std::sqrt(sum / static_cast<double>(n));
}

double rel(const DepthMap& pred, const DepthMap& gt) {
  auto [sum, n] = sum_valid(
      pred, gt, [](double p, double g) { return std::abs(p - g) / g; }, "rel");
  return sum / static_cast<double>(n);
}

double delta(const DepthMap& pred, const DepthMap& gt, double th) {
  if (!(th > 1.0)) throw ParameterError("delta: threshold must exceed 1");
  auto [sum, n] = sum_valid(
      pred, gt,
      [th](double p, double g) {
        if (!(p > 0.0)) return 0.0;
        return std::max(p / g, g / p) < th ? 1.0 : 0.0;
      },
      "delta");
  return 100.0 * sum / static_cast<double>(n);
}

PointCloud depth_to_pointcloud(const DepthMap& d, const CameraIntrinsics& k) {
  PointCloud cloud;
  cloud.reserve(d.valid_count());
  for (int v = 0; v < d.height(); ++v) {
    for (int u = 0; u < d.width(); ++u) {
      const double z = d.at(v, u);
      if (!(z > 0.0)) continue;
      // K^-1 [u, v, 1] for a zero-skew pinhole.
      cloud.push_back({(u - k.cx) / k.fx * z, (v - k.cy) / k.fy * z, z});
    }
  }
  return cloud;
}

std::vector<double> nearest_squared_distances(const PointCloud& from, const PointCloud& to) {
  if (to.empty()) throw UndefinedMetricError("nearest neighbor query against an empty cloud");
  const KdTree tree(to);
  std::vector<double> out(from.size());
  for (std::size_t i = 0; i < from.size(); ++i) out[i] = tree.nearest_squared(from[i]);
  return out;
}

namespace {

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double fraction_below(const std::vector<double>& squared, double threshold) {
  const double t2 = threshold * threshold;
  std::size_t n = 0;
  for (double d2 : squared) n += d2 < t2;
  return static_cast<double>(n) / static_cast<double>(squared.size());
}

F1Result f1_from_distances(const std::vector<double>& pred_to_gt, const std::vector<double>& gt_to_pred) {
  F1Result r;
  double total = 0.0;
  for (std::size_t i = 0; i < kF1Thresholds.size(); ++i) {
    r.precision[i] = fraction_below(pred_to_gt, kF1Thresholds[i]);
    r.recall[i] = fraction_below(gt_to_pred, kF1Thresholds[i]);
    const double p = r.precision[i], q = r.recall[i];
    r.fscore[i] = (p > 0.0 && q > 0.0) ? 2.0 / (1.0 / p + 1.0 / q) : 0.0;
    total += r.fscore[i];
  }
  r.f1 = total / static_cast<double>(kF1Thresholds.size());
  return r;
}

void require_clouds(const PointCloud& a, const PointCloud& b, const char* name) {
  if (a.empty() || b.empty()) throw UndefinedMetricError(std::string(name) + ": empty point cloud");
}

}  // namespace

double chamfer(const PointCloud& a, const PointCloud& b) {
  require_clouds(a, b, "chamfer");
  return mean(nearest_squared_distances(a, b)) + mean(nearest_squared_distances(b, a));
}

F1Result f1_score(const PointCloud& pred, const PointCloud& gt) {
  require_clouds(pred, gt, "f1_score");
  return f1_from_distances(nearest_squared_distances(pred, gt), nearest_squared_distances(gt, pred));
}

MetricsReport evaluate_sample(const DepthMap& pred, const DepthMap& gt, const CameraIntrinsics& k) {
  MetricsReport r;
  r.rmse = rmse(pred, gt);
  r.rel = rel(pred, gt);
  for (std::size_t i = 0; i < kDeltaThresholds.size(); ++i) r.delta[i] = delta(pred, gt, kDeltaThresholds[i]);
  r.n_valid = gt.valid_count();

  DepthMap pred_on_gt(pred.height(), pred.width());
  for (int v = 0; v < gt.height(); ++v) {
    for (int u = 0; u < gt.width(); ++u) {
      if (gt.valid(v, u)) pred_on_gt.at(v, u) = pred.at(v, u);
    }
  }
  const auto cloud_pred = depth_to_pointcloud(pred_on_gt, k);
  const auto cloud_gt = depth_to_pointcloud(gt, k);
  require_clouds(cloud_pred, cloud_gt, "evaluate_sample");
  const auto p2g = nearest_squared_distances(cloud_pred, cloud_gt);
  const auto g2p = nearest_squared_distances(cloud_gt, cloud_pred);
  r.cd = mean(g2p) + mean(p2g);
  r.f1 = f1_from_distances(p2g, g2p);
  return r;
}

MetricsReport aggregate(const std::vector<MetricsReport>& reports) {
  if (reports.empty()) throw UndefinedMetricError("aggregate: no samples");
  MetricsReport out;
  for (const auto& r : reports) {
    out.rmse += r.rmse;
    out.rel += r.rel;
    out.cd += r.cd;
    out.f1.f1 += r.f1.f1;
    for (std::size_t i = 0; i < 3; ++i) {
      out.delta[i] += r.delta[i];
      out.f1.precision[i] += r.f1.precision[i];
      out.f1.recall[i] += r.f1.recall[i];
      out.f1.fscore[i] += r.f1.fscore[i];
    }
    out.n_valid += r.n_valid;
  }
  const double n = static_cast<double>(reports.size());
  out.rmse /= n;
  out.rel /= n;
  out.cd /= n;
  out.f1.f1 /= n;
  for (std::size_t i = 0; i < 3; ++i) {
    out.delta[i] /= n;
    out.f1.precision[i] /= n;
    out.f1.recall[i] /= n;
    out.f1.fscore[i] /= n;
  }
  return out;
}

}  // namespace rdfc::metrics
