#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <type_traits>
#include <variant>

#include "fracenv/core/domain.hpp"
#include "fracenv/errors.hpp"

namespace fracenv {

namespace datum {

template <typename Scalar>
struct Constant {
    Scalar value{};
};

/// min(a1 (x1-c1)^2 + a2 (x2-c2)^2, cap) + offset, with a1, a2 >= 0.
template <typename Scalar>
struct ClippedQuadratic {
    Point2<Scalar> coeffs{Scalar(1), Scalar(0)};
    Point2<Scalar> center{Scalar(0), Scalar(0)};
    Scalar cap{2};
    Scalar offset{0};
};

/// amplitude * cos(frequency * theta + phase) + offset, theta the polar angle about `center`.
template <typename Scalar>
struct CosineAngle {
    Scalar amplitude{1};
    int frequency{2};
    Scalar phase{0};
    Scalar offset{0};
    Point2<Scalar> center{Scalar(0), Scalar(0)};
};

/// low + (high - low) (1 + tanh((axis . x - shift) / width)) / 2.
template <typename Scalar>
struct SmoothedStep {
    Point2<Scalar> axis{Scalar(1), Scalar(0)};
    Scalar shift{0};
    Scalar width{Scalar(0.1)};
    Scalar low{0};
    Scalar high{1};
};

/// clamp(intercept + slope . x, low, high).
template <typename Scalar>
struct ClampedAffine {
    Point2<Scalar> slope{Scalar(1), Scalar(0)};
    Scalar intercept{0};
    Scalar low{-1};
    Scalar high{1};
};

} // namespace datum

/// Bounded continuous exterior datum from a fixed catalog, with declared
/// bounds m <= g <= M. Evaluation is defined on the whole plane.
template <typename Scalar>
class ExteriorDatum {
public:
    using Point = Point2<Scalar>;
    using Expression = std::variant<datum::Constant<Scalar>, datum::ClippedQuadratic<Scalar>,
                                    datum::CosineAngle<Scalar>, datum::SmoothedStep<Scalar>,
                                    datum::ClampedAffine<Scalar>>;

    /// Declared bounds default to the natural range of the expression.
    explicit ExteriorDatum(Expression e) : expr_(std::move(e)) {
        auto [lo, hi] = natural_bounds();
        inf_ = lo;
        sup_ = hi;
    }

    ExteriorDatum(Expression e, Scalar inf, Scalar sup) : expr_(std::move(e)), inf_(inf), sup_(sup) {
        if (!(inf <= sup))
            throw InvalidArgument("datum bounds must satisfy m <= M");
    }

    const Expression& expression() const noexcept { return expr_; }
    Scalar inf() const noexcept { return inf_; }
    Scalar sup() const noexcept { return sup_; }
    std::pair<Scalar, Scalar> bounds() const noexcept { return {inf_, sup_}; }

    std::string name() const {
        return std::visit(
            [](const auto& e) -> std::string {
                using T = std::decay_t<decltype(e)>;
                if constexpr (std::is_same_v<T, datum::Constant<Scalar>>) return "constant";
                else if constexpr (std::is_same_v<T, datum::ClippedQuadratic<Scalar>>) return "clipped_quadratic";
                else if constexpr (std::is_same_v<T, datum::CosineAngle<Scalar>>) return "cosine_angle";
                else if constexpr (std::is_same_v<T, datum::SmoothedStep<Scalar>>) return "smoothed_step";
                else return "clamped_affine";
            },
            expr_);
    }

    Scalar operator()(const Point& x) const { return eval(x); }

    Scalar eval(const Point& x) const {
        return std::visit([&](const auto& e) { return eval_one(e, x); }, expr_);
    }

    /// Limit of g(x + t z) as t -> +infinity. Every catalog expression has one.
    std::optional<Scalar> far_field(const Point& x, const Point& z) const {
        return std::visit([&](const auto& e) { return far_one(e, x, z); }, expr_);
    }

    /// The expression shifted by a constant (bounds shift with it).
    ExteriorDatum shifted(Scalar c) const {
        Expression e = std::visit(
            [&](auto v) -> Expression {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, datum::Constant<Scalar>>) v.value += c;
                else if constexpr (std::is_same_v<T, datum::ClippedQuadratic<Scalar>>) v.offset += c;
                else if constexpr (std::is_same_v<T, datum::CosineAngle<Scalar>>) v.offset += c;
                else if constexpr (std::is_same_v<T, datum::SmoothedStep<Scalar>>) { v.low += c; v.high += c; }
                else { v.intercept += c; v.low += c; v.high += c; }
                return v;
            },
            expr_);
        return ExteriorDatum(std::move(e), inf_ + c, sup_ + c);
    }

    struct AuditReport {
        int samples = 0;
        Scalar sampled_min = std::numeric_limits<Scalar>::infinity();
        Scalar sampled_max = -std::numeric_limits<Scalar>::infinity();
        bool consistent = true;
    };

    /// Dense sampling of the exterior annulus of width `width` around the
    /// domain; checks m <= g <= M at every sample.
    AuditReport audit(const Domain<Scalar>& d, Scalar width, int samples = 10000,
                      std::uint64_t seed = 0x5eed) const {
        AuditReport r;
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<Scalar> angle(0, 2 * std::numbers::pi_v<Scalar>);
        std::uniform_real_distribution<Scalar> depth(0, 1);
        const Scalar slack = Scalar(1e-12) * (Scalar(1) + std::abs(sup_) + std::abs(inf_));
        for (int i = 0; i < samples; ++i) {
            const Point y = d.boundary_point(angle(rng));
            const Point x = y + depth(rng) * width * d.outward_normal(y);
            const Scalar v = eval(x);
            r.sampled_min = std::min(r.sampled_min, v);
            r.sampled_max = std::max(r.sampled_max, v);
            if (!(v >= inf_ - slack && v <= sup_ + slack))
                r.consistent = false;
        }
        r.samples = samples;
        return r;
    }

private:
    static Scalar eval_one(const datum::Constant<Scalar>& e, const Point&) { return e.value; }

    static Scalar eval_one(const datum::ClippedQuadratic<Scalar>& e, const Point& x) {
        const Point d = x - e.center;
        const Scalar q = e.coeffs.x() * d.x() * d.x() + e.coeffs.y() * d.y() * d.y();
        return std::min(q, e.cap) + e.offset;
    }

    static Scalar eval_one(const datum::CosineAngle<Scalar>& e, const Point& x) {
        const Point d = x - e.center;
        const Scalar theta = std::atan2(d.y(), d.x());
        return e.amplitude * std::cos(e.frequency * theta + e.phase) + e.offset;
    }

    static Scalar eval_one(const datum::SmoothedStep<Scalar>& e, const Point& x) {
        const Scalar arg = (e.axis.dot(x) - e.shift) / e.width;
        return e.low + (e.high - e.low) * Scalar(0.5) * (Scalar(1) + std::tanh(arg));
    }

    static Scalar eval_one(const datum::ClampedAffine<Scalar>& e, const Point& x) {
        return std::clamp(e.intercept + e.slope.dot(x), e.low, e.high);
    }

    static std::optional<Scalar> far_one(const datum::Constant<Scalar>& e, const Point&, const Point&) {
        return e.value;
    }

    static std::optional<Scalar> far_one(const datum::ClippedQuadratic<Scalar>& e, const Point& x,
                                         const Point& z) {
        const Scalar growth = e.coeffs.x() * z.x() * z.x() + e.coeffs.y() * z.y() * z.y();
        if (growth > Scalar(0))
            return e.cap + e.offset;
        return eval_one(e, x);
    }

    static std::optional<Scalar> far_one(const datum::CosineAngle<Scalar>& e, const Point&, const Point& z) {
        return e.amplitude * std::cos(e.frequency * std::atan2(z.y(), z.x()) + e.phase) + e.offset;
    }

    static std::optional<Scalar> far_one(const datum::SmoothedStep<Scalar>& e, const Point& x,
                                         const Point& z) {
        const Scalar slope = e.axis.dot(z);
        if (slope > Scalar(0)) return e.high;
        if (slope < Scalar(0)) return e.low;
        return eval_one(e, x);
    }

    static std::optional<Scalar> far_one(const datum::ClampedAffine<Scalar>& e, const Point& x,
                                         const Point& z) {
        const Scalar slope = e.slope.dot(z);
        if (slope > Scalar(0)) return e.high;
        if (slope < Scalar(0)) return e.low;
        return eval_one(e, x);
    }

    std::pair<Scalar, Scalar> natural_bounds() const {
        return std::visit(
            [](const auto& e) -> std::pair<Scalar, Scalar> {
                using T = std::decay_t<decltype(e)>;
                if constexpr (std::is_same_v<T, datum::Constant<Scalar>>)
                    return {e.value, e.value};
                else if constexpr (std::is_same_v<T, datum::ClippedQuadratic<Scalar>>)
                    return {e.offset + std::min(Scalar(0), e.cap), e.offset + e.cap};
                else if constexpr (std::is_same_v<T, datum::CosineAngle<Scalar>>)
                    return {e.offset - std::abs(e.amplitude), e.offset + std::abs(e.amplitude)};
                else if constexpr (std::is_same_v<T, datum::SmoothedStep<Scalar>>)
                    return {std::min(e.low, e.high), std::max(e.low, e.high)};
                else
                    return {e.low, e.high};
            },
            expr_);
    }

    Expression expr_;
    Scalar inf_{};
    Scalar sup_{};
};

using ExteriorDatumd = ExteriorDatum<double>;

} // namespace fracenv
