#pragma once

// libtorch defines its own CHECK macro; doctest must be included after it so
// the test assertions win.
#include <torch/torch.h>

#include <vector>

#include "doctest.h"

inline bool has_shape(const torch::Tensor& t, std::vector<int64_t> shape) { return t.sizes() == torch::IntArrayRef(shape); }
