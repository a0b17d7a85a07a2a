#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "fracenv/errors.hpp"

namespace fracenv {

template <typename Scalar>
using Point2 = Eigen::Matrix<Scalar, 2, 1>;

using Point2d = Point2<double>;

enum class DomainKind { Disk, Ellipse, Interval };

inline std::string to_string(DomainKind k) {
    switch (k) {
    case DomainKind::Disk: return "disk";
    case DomainKind::Ellipse: return "ellipse";
    case DomainKind::Interval: return "interval";
    }
    return "unknown";
}

/// Axis-aligned ellipse (disk as the equal-axes case), or an interval on the
/// horizontal line through the center for one-dimensional runs.
///
/// Points on the boundary are not interior: `contains` uses the strict
/// inequality, so a grid node that lands on the boundary is treated as
/// exterior and takes the datum value.
template <typename Scalar>
class Domain {
public:
    using Point = Point2<Scalar>;

    static Domain disk(const Point& center, Scalar radius, int boundary_samples = 256) {
        return Domain(DomainKind::Disk, center, radius, radius, boundary_samples);
    }

    static Domain ellipse(const Point& center, Scalar a, Scalar b, int boundary_samples = 256) {
        return Domain(DomainKind::Ellipse, center, a, b, boundary_samples);
    }

    /// The open segment (center - half_length, center + half_length) x {center.y}.
    static Domain interval(const Point& center, Scalar half_length) {
        return Domain(DomainKind::Interval, center, half_length, half_length, 2);
    }

    DomainKind kind() const noexcept { return kind_; }
    const Point& center() const noexcept { return center_; }
    Scalar a() const noexcept { return a_; }
    Scalar b() const noexcept { return b_; }
    int boundary_sample_count() const noexcept { return samples_; }
    bool is_interval() const noexcept { return kind_ == DomainKind::Interval; }

    Scalar diameter() const noexcept { return 2 * std::max(a_, b_); }

    /// Ellipse level function; < 1 inside, == 1 on the boundary.
    Scalar level(const Point& x) const {
        const Scalar dx = (x.x() - center_.x()) / a_;
        if (is_interval())
            return (x.y() == center_.y()) ? dx * dx : Scalar(2);
        const Scalar dy = (x.y() - center_.y()) / b_;
        return dx * dx + dy * dy;
    }

    bool contains(const Point& x) const { return level(x) < Scalar(1); }

    bool in_closure(const Point& x, Scalar slack = Scalar(1e-12)) const {
        return level(x) <= Scalar(1) + slack;
    }

    /// Parameters (t_minus, t_plus) such that x + t z lies inside exactly for
    /// t in (t_minus, t_plus). z need not be unit; t is in units of |z|.
    std::pair<Scalar, Scalar> clip(const Point& x, const Point& z) const {
        if (!in_closure(x))
            throw GeometryError("clip: base point lies outside the domain closure");
        if (is_interval()) {
            if (std::abs(z.y()) > Scalar(1e-14) * z.norm() || z.x() == Scalar(0))
                throw GeometryError("clip: interval domains admit only the axis direction");
            const Scalar lo = (center_.x() - a_ - x.x()) / z.x();
            const Scalar hi = (center_.x() + a_ - x.x()) / z.x();
            return {std::min(lo, hi), std::max(lo, hi)};
        }
        const Scalar dx = x.x() - center_.x();
        const Scalar dy = x.y() - center_.y();
        const Scalar A = (z.x() * z.x()) / (a_ * a_) + (z.y() * z.y()) / (b_ * b_);
        const Scalar B = Scalar(2) * (dx * z.x() / (a_ * a_) + dy * z.y() / (b_ * b_));
        const Scalar C = std::min(level(x) - Scalar(1), Scalar(0));
        if (A <= Scalar(0))
            throw GeometryError("clip: zero direction");
        const Scalar disc = std::max(B * B - Scalar(4) * A * C, Scalar(0));
        const Scalar q = Scalar(-0.5) * (B + std::copysign(std::sqrt(disc), B));
        Scalar r1, r2;
        if (q == Scalar(0)) {
            r1 = r2 = Scalar(0);
        } else {
            r1 = q / A;
            r2 = C / q;
        }
        return {std::min(r1, r2), std::max(r1, r2)};
    }

    /// Boundary point at parametric angle phi (for intervals: right end when
    /// cos(phi) >= 0, left end otherwise).
    Point boundary_point(Scalar phi) const {
        if (is_interval())
            return Point(center_.x() + (std::cos(phi) >= 0 ? a_ : -a_), center_.y());
        return Point(center_.x() + a_ * std::cos(phi), center_.y() + b_ * std::sin(phi));
    }

    /// m boundary points at equally spaced parametric angles, starting at 0.
    std::vector<Point> boundary_samples(int m) const {
        std::vector<Point> pts;
        pts.reserve(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i)
            pts.push_back(boundary_point(Scalar(2) * std::numbers::pi_v<Scalar> * i / m));
        return pts;
    }

    /// Outward unit normal at a boundary point.
    Point outward_normal(const Point& y) const {
        if (is_interval())
            return Point(y.x() >= center_.x() ? 1 : -1, 0);
        Point n((y.x() - center_.x()) / (a_ * a_), (y.y() - center_.y()) / (b_ * b_));
        return n.normalized();
    }

    /// Closest boundary point.
    Point project(const Point& x) const {
        if (is_interval()) {
            return Point(x.x() >= center_.x() ? center_.x() + a_ : center_.x() - a_, center_.y());
        }
        const Scalar dx = x.x() - center_.x();
        const Scalar dy = x.y() - center_.y();
        if (a_ == b_) {
            const Scalar r = std::hypot(dx, dy);
            if (r == Scalar(0))
                return Point(center_.x() + a_, center_.y());
            return Point(center_.x() + a_ * dx / r, center_.y() + a_ * dy / r);
        }
        // Work in the first quadrant with the major axis first, then map back.
        const bool swap = b_ > a_;
        Scalar e0 = swap ? b_ : a_;
        Scalar e1 = swap ? a_ : b_;
        Scalar y0 = std::abs(swap ? dy : dx);
        Scalar y1 = std::abs(swap ? dx : dy);
        auto [x0, x1] = closest_on_ellipse(e0, e1, y0, y1);
        Scalar px = swap ? x1 : x0;
        Scalar py = swap ? x0 : x1;
        px = std::copysign(px, dx);
        py = std::copysign(py, dy);
        return Point(center_.x() + px, center_.y() + py);
    }

    Scalar distance_to_boundary(const Point& x) const { return (x - project(x)).norm(); }

private:
    Domain(DomainKind kind, const Point& center, Scalar a, Scalar b, int samples)
        : kind_(kind), center_(center), a_(a), b_(b), samples_(samples) {
        if (!(a > Scalar(0)) || !(b > Scalar(0)))
            throw InvalidArgument("domain semi-axes must be positive");
        if (samples < 1)
            throw InvalidArgument("domain boundary sample count must be positive");
    }

    // Closest point on x0^2/e0^2 + x1^2/e1^2 = 1 (e0 >= e1) to (y0, y1) in the
    // first quadrant; root of the standard distance function by bisection.
    static std::pair<Scalar, Scalar> closest_on_ellipse(Scalar e0, Scalar e1, Scalar y0, Scalar y1) {
        if (y1 > Scalar(0)) {
            if (y0 > Scalar(0)) {
                const Scalar z0 = y0 / e0;
                const Scalar z1 = y1 / e1;
                const Scalar g = z0 * z0 + z1 * z1 - Scalar(1);
                if (g == Scalar(0))
                    return {y0, y1};
                const Scalar r0 = (e0 / e1) * (e0 / e1);
                Scalar lo = z1 - Scalar(1);
                Scalar hi = g < 0 ? Scalar(0) : std::hypot(r0 * z0, z1) - Scalar(1);
                Scalar sroot = Scalar(0);
                for (int i = 0; i < 200; ++i) {
                    sroot = Scalar(0.5) * (lo + hi);
                    if (sroot == lo || sroot == hi)
                        break;
                    const Scalar n0 = r0 * z0 / (sroot + r0);
                    const Scalar n1 = z1 / (sroot + Scalar(1));
                    const Scalar f = n0 * n0 + n1 * n1 - Scalar(1);
                    if (f > 0)
                        lo = sroot;
                    else if (f < 0)
                        hi = sroot;
                    else
                        break;
                }
                return {r0 * y0 / (sroot + r0), y1 / (sroot + Scalar(1))};
            }
            return {Scalar(0), e1};
        }
        const Scalar numer0 = e0 * y0;
        const Scalar denom0 = e0 * e0 - e1 * e1;
        if (numer0 < denom0) {
            const Scalar xde0 = numer0 / denom0;
            return {e0 * xde0, e1 * std::sqrt(std::max(Scalar(0), Scalar(1) - xde0 * xde0))};
        }
        return {e0, Scalar(0)};
    }

    DomainKind kind_;
    Point center_;
    Scalar a_;
    Scalar b_;
    int samples_;
};

using Domaind = Domain<double>;

} // namespace fracenv
