#pragma once

#include <cmath>
#include <numbers>

#include "fracenv/errors.hpp"

namespace fracenv {

/// Normalizing constant of the one-dimensional fractional Laplacian,
///   c(s) = 2^{2s} s Gamma(s + 1/2) / (sqrt(pi) Gamma(1 - s)),
/// evaluated through log-gamma. c(s) ~ 2 (1 - s) as s -> 1.
template <typename Scalar>
Scalar frac_constant(Scalar s) {
    if (!(s > Scalar(0) && s < Scalar(1)))
        throw InvalidArgument("frac_constant: s must lie in (0, 1)");
    using std::lgamma;
    using std::log;
    const Scalar log_c = Scalar(2) * s * std::numbers::ln2_v<Scalar> + log(s) + lgamma(s + Scalar(0.5)) -
                         Scalar(0.5) * log(std::numbers::pi_v<Scalar>) - lgamma(Scalar(1) - s);
    return std::exp(log_c);
}

} // namespace fracenv
