#pragma once

#include <cmath>
#include <vector>

#include "fracenv/errors.hpp"
#include "fracenv/frac1d/constant.hpp"

namespace fracenv {

/// Quadrature weights of the discrete principal-value operator
///
///   c(s) PV int (v(t + r) - v(t)) / |r|^{1+2s} dr
///
/// on a lattice of spacing l, truncated at K nodes per side:
///
///   L v_j = sum_{k=1..K} w_k (v_{j+k} + v_{j-k} - 2 v_j) + tail (g+ + g- - 2 v_j).
///
/// The first cell (0, l) uses a quadratic model of v, which turns into the
/// centered second difference with coefficient c l^{-2s} / (2 - 2s). The rest
/// of (0, K l) is split into cells ((k - 1/2) l, (k + 1/2) l) integrated exactly
/// against the kernel (the first one starts at l, the last one stops at K l).
/// The tail beyond K l carries mass c / (2 s (K l)^{2s}) per side.
template <typename Scalar>
struct KernelWeights {
    Scalar s{};
    Scalar c{};
    Scalar spacing{};
    Scalar near{};               ///< second-difference coefficient of the first cell
    std::vector<Scalar> weights; ///< weights[k-1] = w_k, k = 1..K; w_1 includes `near`
    Scalar tail{};               ///< per side

    int K() const noexcept { return static_cast<int>(weights.size()); }
    Scalar w(int k) const { return weights[static_cast<std::size_t>(k - 1)]; }

    /// Sum of all weights acting on v_j: 2 sum w_k + 2 tail.
    Scalar total() const {
        Scalar acc = Scalar(0);
        for (Scalar x : weights)
            acc += x;
        return Scalar(2) * acc + Scalar(2) * tail;
    }

    /// Weight outside the first cell, both sides (the far-field mass).
    Scalar far_mass() const { return total() - Scalar(2) * near; }
};

namespace detail {

/// c/(2s) (a^{-2s} - b^{-2s}) for 0 < a < b, without cancellation.
template <typename Scalar>
Scalar cell_mass(Scalar c, Scalar s, Scalar a, Scalar b) {
    const Scalar lead = std::pow(a, -Scalar(2) * s);
    const Scalar frac = -std::expm1(-Scalar(2) * s * std::log1p((b - a) / a));
    return c / (Scalar(2) * s) * lead * frac;
}

} // namespace detail

template <typename Scalar>
KernelWeights<Scalar> kernel_weights(Scalar s, Scalar spacing, int K) {
    if (K < 2)
        throw InvalidArgument("kernel_weights: need at least two nodes per side");
    if (!(spacing > Scalar(0)))
        throw InvalidArgument("kernel_weights: spacing must be positive");
    KernelWeights<Scalar> kw;
    kw.s = s;
    kw.c = frac_constant(s);
    kw.spacing = spacing;
    const Scalar l = spacing;
    kw.near = kw.c * std::pow(l, -Scalar(2) * s) / (Scalar(2) - Scalar(2) * s);
    kw.weights.resize(static_cast<std::size_t>(K));
    kw.weights[0] = kw.near + detail::cell_mass(kw.c, s, l, Scalar(1.5) * l);
    for (int k = 2; k <= K; ++k) {
        const Scalar lo = (Scalar(k) - Scalar(0.5)) * l;
        const Scalar hi = (k == K) ? Scalar(K) * l : (Scalar(k) + Scalar(0.5)) * l;
        kw.weights[static_cast<std::size_t>(k - 1)] = detail::cell_mass(kw.c, s, lo, hi);
    }
    kw.tail = kw.c / (Scalar(2) * s * std::pow(Scalar(K) * l, Scalar(2) * s));
    return kw;
}

} // namespace fracenv
