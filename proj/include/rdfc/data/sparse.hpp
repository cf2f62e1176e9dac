#pragma once

#include <cstdint>

#include "rdfc/core/types.hpp"

namespace rdfc::data {

/// Keeps min(n, #valid) valid pixels of `d`, drawn uniformly without
/// replacement; every other pixel becomes 0. Deterministic per seed.
DepthMap sample_sparse(const DepthMap& d, int n, std::uint64_t seed);

}  // namespace rdfc::data
