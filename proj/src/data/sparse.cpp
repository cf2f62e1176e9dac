#include "rdfc/data/sparse.hpp"

#include <utility>
#include <vector>

#include "rdfc/core/random.hpp"

namespace rdfc::data {

DepthMap sample_sparse(const DepthMap& d, int n, std::uint64_t seed) {
  if (n < 0) throw ParameterError("sample_sparse: n must be non-negative");
  std::vector<std::size_t> valid;
  const auto src = d.data();
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (src[i] > 0.0f) valid.push_back(i);
  }
  const std::size_t keep = std::min<std::size_t>(static_cast<std::size_t>(n), valid.size());

  // Partial Fisher-Yates over the valid indices.
  Rng rng(derive_seed(seed, {0x737061727365}));
  for (std::size_t i = 0; i < keep; ++i) {
    const std::size_t j = i + rng.below(valid.size() - i);
    std::swap(valid[i], valid[j]);
  }

  DepthMap out(d.height(), d.width());
  auto dst = out.data();
  for (std::size_t i = 0; i < keep; ++i) dst[valid[i]] = src[valid[i]];
  return out;
}

}  // namespace rdfc::data
