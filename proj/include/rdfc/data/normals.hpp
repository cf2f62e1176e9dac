#pragma once

#include "rdfc/core/types.hpp"

namespace rdfc::data {

struct NormalEstimate {
  NormalMap normals;
  Mask valid;  // pixels with a usable fit
};

/// Least-squares plane fit over a window x window neighborhood of
/// back-projected valid pixels. Pixels whose RMS point-to-plane residual
/// exceeds `max_residual` meters (or with fewer than 3 neighbors) are marked
/// invalid. Normals face the camera and are returned in the gravity frame
/// (x right, y forward, z up).
NormalEstimate estimate_normals(const DepthMap& depth, const CameraIntrinsics& k, int window = 5,
                                double max_residual = 0.01);

}  // namespace rdfc::data
