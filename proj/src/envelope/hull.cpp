#include "fracenv/envelope/envelope.hpp"

#include <cmath>
#include <limits>

#include "fracenv/errors.hpp"

namespace fracenv {

double hull_envelope_oracle(std::span<const Point2d> points, std::span<const double> values, const Point2d& x) {
    if (points.size() != values.size())
        throw InvalidArgument("hull oracle: points and values differ in length");
    if (points.size() < 3)
        throw InvalidArgument("hull oracle: need at least three samples");
    const std::size_t m = points.size();
    double scale = 0.0;
    for (const auto& p : points)
        scale = std::max(scale, (p - x).norm());
    const double eps = 1e-12 * std::max(1.0, scale);

    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i)
        if ((points[i] - x).norm() <= eps)
            best = std::min(best, values[i]);

    auto cross = [](const Point2d& a, const Point2d& b) { return a.x() * b.y() - a.y() * b.x(); };

    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            const Point2d e = points[j] - points[i];
            const Point2d r = x - points[i];
            const double len2 = e.squaredNorm();
            if (len2 == 0.0)
                continue;
            if (std::abs(cross(e, r)) > eps * std::sqrt(len2))
                continue;
            const double t = e.dot(r) / len2;
            if (t < -1e-12 || t > 1.0 + 1e-12)
                continue;
            best = std::min(best, (1.0 - t) * values[i] + t * values[j]);
        }
    }

    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            const Point2d e1 = points[j] - points[i];
            for (std::size_t k = j + 1; k < m; ++k) {
                const Point2d e2 = points[k] - points[i];
                const double det = cross(e1, e2);
                if (std::abs(det) <= 1e-14 * e1.norm() * e2.norm())
                    continue;
                const Point2d r = x - points[i];
                const double l1 = cross(r, e2) / det;
                const double l2 = cross(e1, r) / det;
                const double l0 = 1.0 - l1 - l2;
                if (l0 < -1e-12 || l1 < -1e-12 || l2 < -1e-12)
                    continue;
                best = std::min(best, l0 * values[i] + l1 * values[j] + l2 * values[k]);
            }
        }
    }

    if (!std::isfinite(best))
        throw GeometryError("hull oracle: point lies outside the hull of the boundary samples");
    return best;
}

} // namespace fracenv
