#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>
#include <vector>

#include "fracenv/core/domain.hpp"
#include "fracenv/errors.hpp"

namespace fracenv {

/// Integer lattice direction (p, q) in canonical form: p > 0, or p == 0 and q > 0.
struct LatticeDirection {
    int p = 1;
    int q = 0;

    double norm() const { return std::hypot(double(p), double(q)); }
    Point2d unit() const { return Point2d(p, q) / norm(); }
    /// Physical distance between consecutive lattice points on this line.
    double step(double h) const { return h * norm(); }

    friend bool operator==(const LatticeDirection&, const LatticeDirection&) = default;
    friend bool operator<(const LatticeDirection& a, const LatticeDirection& b) {
        return std::pair(a.p, a.q) < std::pair(b.p, b.q);
    }
};

/// Lattice directions with no two equal or antipodal, sorted by (p, q).
/// The order fixes tie-breaking in every min over directions.
class DirectionSet {
public:
    DirectionSet() = default;

    /// Coprime (p, q) with max(|p|, |q|) <= width.
    static DirectionSet wide_stencil(int width) {
        if (width < 1)
            throw InvalidArgument("stencil width must be >= 1");
        std::vector<LatticeDirection> dirs;
        for (int p = 0; p <= width; ++p)
            for (int q = -width; q <= width; ++q)
                if (std::gcd(p, q) == 1 && (p > 0 || q > 0))
                    dirs.push_back({p, q});
        return DirectionSet(std::move(dirs));
    }

    /// Arbitrary directions; each is reduced to lowest terms and canonical
    /// orientation, duplicates dropped.
    static DirectionSet from(const std::vector<std::pair<int, int>>& pq) {
        std::vector<LatticeDirection> dirs;
        for (auto [p, q] : pq) {
            const int g = std::gcd(p, q);
            if (g == 0)
                throw InvalidArgument("zero lattice direction");
            p /= g;
            q /= g;
            if (p < 0 || (p == 0 && q < 0)) {
                p = -p;
                q = -q;
            }
            dirs.push_back({p, q});
        }
        return DirectionSet(std::move(dirs));
    }

    static DirectionSet axis() { return from({{1, 0}}); }

    int size() const noexcept { return static_cast<int>(dirs_.size()); }
    bool empty() const noexcept { return dirs_.empty(); }
    const LatticeDirection& operator[](int i) const { return dirs_[static_cast<std::size_t>(i)]; }
    auto begin() const { return dirs_.begin(); }
    auto end() const { return dirs_.end(); }

private:
    explicit DirectionSet(std::vector<LatticeDirection> dirs) : dirs_(std::move(dirs)) {
        std::sort(dirs_.begin(), dirs_.end());
        dirs_.erase(std::unique(dirs_.begin(), dirs_.end()), dirs_.end());
    }

    std::vector<LatticeDirection> dirs_;
};

} // namespace fracenv
