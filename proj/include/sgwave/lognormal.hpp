#pragma once

#include "sgwave/assembly.hpp"
#include "sgwave/kle.hpp"
#include "sgwave/pce.hpp"

namespace sgwave {

// PCE coefficients of exp(g) for a KLE-expanded Gaussian g, in the normalized
// Hermite basis: c_0 = exp(g0 + 1/2 sum g_i^2) and
// c_alpha = c_0 prod_v g_v^{alpha_v} / sqrt(alpha_v!), g_v = sqrt(lambda_v) phi_v.
// The basis must span the same variables as the expansion.
CoefficientField lognormal_pce(const KleExpansion& kle, const PceBasis& basis_in);

}  // namespace sgwave
