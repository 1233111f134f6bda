#pragma once

#include "gwtail/types.hpp"

namespace gwtail {

// Principal-branch-free complex log-gamma (Lanczos, g = 607/128, 15 terms).
// Accurate to ~1e-13 relative for Re z > 0; reflection handles Re z <= 0.5.
// The imaginary part is only meaningful modulo 2*pi; all callers exponentiate.
cx log_gamma(cx z);

// Reciprocal gamma with pole detection: at nonpositive integers 1/Gamma
// vanishes, so callers drop the corresponding term.
struct RGamma {
    bool pole = false;
    cx log_gamma_value{};  // valid when !pole
};
RGamma rgamma_checked(cx z);

}  // namespace gwtail
