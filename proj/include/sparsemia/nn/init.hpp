// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "sparsemia/nn/types.hpp"

namespace sparsemia::nn {

/// `count` i.i.d. samples from the open interval (-1/√fan_in, 1/√fan_in).
/// fan_in is the input dimension of a linear layer, or input channels ×
/// kernel width × kernel height of a convolution.
Vector init_uniform(Index count, Index fan_in, Rng& rng);

/// Same distribution with an explicit bound.
Vector init_uniform_bound(Index count, double bound, Rng& rng);

}  // namespace sparsemia::nn
