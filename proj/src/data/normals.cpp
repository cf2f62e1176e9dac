#include "rdfc/data/normals.hpp"

#include <cmath>

#include <Eigen/Dense>

namespace rdfc::data {

NormalEstimate estimate_normals(const DepthMap& depth, const CameraIntrinsics& k, int window, double max_residual) {
  if (window < 3 || window % 2 == 0) throw ParameterError("estimate_normals: window must be odd and >= 3");
  const int h = depth.height(), w = depth.width(), half = window / 2;
  NormalEstimate out{NormalMap(h, w), Mask(h, w, 1)};

  auto point = [&](int r, int c) {
    const double d = depth.at(r, c);
    return Eigen::Vector3d((c - k.cx) / k.fx * d, (r - k.cy) / k.fy * d, d);
  };

  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (!depth.valid(r, c)) continue;
      Eigen::Vector3d mean = Eigen::Vector3d::Zero();
      int n = 0;
      for (int dr = -half; dr <= half; ++dr) {
        for (int dc = -half; dc <= half; ++dc) {
          const int rr = r + dr, cc = c + dc;
          if (rr < 0 || rr >= h || cc < 0 || cc >= w || !depth.valid(rr, cc)) continue;
          mean += point(rr, cc);
          ++n;
        }
      }
      if (n < 3) continue;
      mean /= n;
      Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
      for (int dr = -half; dr <= half; ++dr) {
        for (int dc = -half; dc <= half; ++dc) {
          const int rr = r + dr, cc = c + dc;
          if (rr < 0 || rr >= h || cc < 0 || cc >= w || !depth.valid(rr, cc)) continue;
          const Eigen::Vector3d q = point(rr, cc) - mean;
          cov += q * q.transpose();
        }
      }
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
      // Smallest eigenvalue is the summed squared plane residual.
      const double rms = std::sqrt(std::max(0.0, eig.eigenvalues()(0)) / n);
      if (rms > max_residual) continue;
      Eigen::Vector3d normal = eig.eigenvectors().col(0).normalized();
      if (normal.dot(point(r, c)) > 0) normal = -normal;
      // Camera (x right, y down, z forward) -> gravity frame (x right, y forward, z up).
      out.normals.set(r, c, {static_cast<float>(normal.x()), static_cast<float>(normal.z()),
                             static_cast<float>(-normal.y())});
      out.valid.at(r, c) = 1;
    }
  }
  return out;
}

}  // namespace rdfc::data
