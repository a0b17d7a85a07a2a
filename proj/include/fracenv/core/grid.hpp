#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <vector>

#include "fracenv/core/datum.hpp"
#include "fracenv/core/domain.hpp"
#include "fracenv/errors.hpp"

namespace fracenv {

/// Values on a uniform Cartesian grid, row-major (index = iy * nx + ix), with
/// a mask marking the nodes strictly inside the domain. Solvers read only
/// masked-in values; everything else comes from the exterior datum.
template <typename Scalar>
class GridFunction {
public:
    using Point = Point2<Scalar>;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    GridFunction() = default;

    GridFunction(const Point& origin, Scalar h, int nx, int ny)
        : origin_(origin), h_(h), nx_(nx), ny_(ny),
          values_(Vector::Zero(static_cast<Eigen::Index>(nx) * ny)),
          mask_(static_cast<std::size_t>(nx) * ny, 0) {
        if (!(h > Scalar(0)) || nx < 1 || ny < 1)
            throw InvalidArgument("grid needs positive spacing and dimensions");
    }

    /// Grid over the domain's bounding box plus `padding`, with a node on the
    /// domain center. Interval domains get a single row.
    static GridFunction covering(const Domain<Scalar>& d, Scalar h, Scalar padding = Scalar(0)) {
        const int half_x = static_cast<int>(std::ceil((d.a() + padding) / h - Scalar(1e-9)));
        const int half_y =
            d.is_interval() ? 0 : static_cast<int>(std::ceil((d.b() + padding) / h - Scalar(1e-9)));
        const Point origin(d.center().x() - half_x * h, d.center().y() - half_y * h);
        GridFunction g(origin, h, 2 * half_x + 1, 2 * half_y + 1);
        g.set_mask(d);
        return g;
    }

    void set_mask(const Domain<Scalar>& d) {
        for (int iy = 0; iy < ny_; ++iy)
            for (int ix = 0; ix < nx_; ++ix)
                mask_[index(ix, iy)] = d.contains(node(ix, iy)) ? 1 : 0;
    }

    /// Fill masked-out nodes with datum values and masked-in nodes with `inside`.
    void fill(const ExteriorDatum<Scalar>& g, Scalar inside) {
        for (int i = 0; i < size(); ++i)
            values_[i] = mask_[i] ? inside : g(node(i));
    }

    const Point& origin() const noexcept { return origin_; }
    Scalar spacing() const noexcept { return h_; }
    int nx() const noexcept { return nx_; }
    int ny() const noexcept { return ny_; }
    int size() const noexcept { return nx_ * ny_; }

    int index(int ix, int iy) const noexcept { return iy * nx_ + ix; }
    int ix(int i) const noexcept { return i % nx_; }
    int iy(int i) const noexcept { return i / nx_; }
    bool in_grid(int ix, int iy) const noexcept { return ix >= 0 && iy >= 0 && ix < nx_ && iy < ny_; }

    /// Physical position of a lattice point; valid also outside the grid box.
    Point node(long ix, long iy) const {
        return Point(origin_.x() + Scalar(ix) * h_, origin_.y() + Scalar(iy) * h_);
    }
    Point node(int i) const { return node(ix(i), iy(i)); }

    bool interior(int i) const noexcept { return mask_[static_cast<std::size_t>(i)] != 0; }
    bool interior(int ix, int iy) const noexcept { return in_grid(ix, iy) && interior(index(ix, iy)); }

    int interior_count() const {
        int n = 0;
        for (auto m : mask_)
            n += m ? 1 : 0;
        return n;
    }

    std::vector<int> interior_indices() const {
        std::vector<int> out;
        for (int i = 0; i < size(); ++i)
            if (mask_[static_cast<std::size_t>(i)])
                out.push_back(i);
        return out;
    }

    Vector& values() noexcept { return values_; }
    const Vector& values() const noexcept { return values_; }
    Scalar& operator[](int i) { return values_[i]; }
    Scalar operator[](int i) const { return values_[i]; }
    const std::vector<std::uint8_t>& mask() const noexcept { return mask_; }

    /// Upper g-extension at a lattice point: stored value inside, datum outside.
    Scalar extended(long ix, long iy, const ExteriorDatum<Scalar>& g) const {
        if (ix >= 0 && iy >= 0 && ix < nx_ && iy < ny_) {
            const int i = index(static_cast<int>(ix), static_cast<int>(iy));
            if (mask_[static_cast<std::size_t>(i)])
                return values_[i];
        }
        return g(node(ix, iy));
    }

    /// Bilinear interpolation of the upper g-extension. Points outside the
    /// domain return the datum directly.
    Scalar sample(const Point& x, const Domain<Scalar>& d, const ExteriorDatum<Scalar>& g) const {
        if (!d.contains(x))
            return g(x);
        const Scalar fx = (x.x() - origin_.x()) / h_;
        const Scalar fy = (x.y() - origin_.y()) / h_;
        const long x0 = static_cast<long>(std::floor(fx));
        const long y0 = static_cast<long>(std::floor(fy));
        const Scalar tx = fx - Scalar(x0);
        if (ny_ == 1)
            return (1 - tx) * extended(x0, 0, g) + tx * extended(x0 + 1, 0, g);
        const Scalar ty = fy - Scalar(y0);
        return (1 - tx) * (1 - ty) * extended(x0, y0, g) + tx * (1 - ty) * extended(x0 + 1, y0, g) +
               (1 - tx) * ty * extended(x0, y0 + 1, g) + tx * ty * extended(x0 + 1, y0 + 1, g);
    }

    /// Same lattice and mask, new values.
    GridFunction with_values(Vector v) const {
        GridFunction out = *this;
        out.values_ = std::move(v);
        return out;
    }

private:
    Point origin_{Scalar(0), Scalar(0)};
    Scalar h_{1};
    int nx_{0};
    int ny_{0};
    Vector values_;
    std::vector<std::uint8_t> mask_;
};

using GridFunctiond = GridFunction<double>;

} // namespace fracenv
