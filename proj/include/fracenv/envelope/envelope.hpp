#pragma once

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "fracenv/core/datum.hpp"
#include "fracenv/core/directions.hpp"
#include "fracenv/core/domain.hpp"
#include "fracenv/core/grid.hpp"
#include "fracenv/core/params.hpp"
#include "fracenv/frac1d/kernel.hpp"

namespace fracenv {

/// Per-node minimum over directions of the discrete directional operator.
struct ResidualReport {
    Eigen::VectorXd min_residual; ///< per grid node, 0 at exterior nodes
    std::vector<int> argmin;      ///< direction index per node, -1 at exterior nodes
    double max_abs_min_residual = 0.0;
    double most_negative = 0.0;   ///< min over interior nodes and all directions
    int worst_node = -1;          ///< node attaining max_abs_min_residual

    bool within(double tol) const { return max_abs_min_residual <= tol && most_negative >= -tol; }
};

struct EnvelopeResult {
    GridFunctiond solution;
    int iterations = 0;
    double final_update = 0.0;   ///< sup-norm change of the sweep that produced `solution`
    ResidualReport residual;
    std::vector<double> trace;   ///< sup-norm change of every sweep
    double max_increase = 0.0;   ///< largest pre-clamp increase seen in any sweep (0 when monotone)
};

/// Directional operators of a monotone grid scheme. For direction d and
/// interior node x, `evaluate` returns the replacement value alpha_d(x) (the
/// value at x that zeroes the operator) and the operator value L_d u(x).
class DirectionalScheme {
public:
    virtual ~DirectionalScheme() = default;
    virtual int directions() const = 0;
    virtual const GridFunctiond& grid() const = 0;
    virtual void evaluate(const Eigen::VectorXd& u, int d, Eigen::VectorXd& alpha, Eigen::VectorXd& op,
                          int workers) const = 0;
};

/// The fractional envelope operator restricted to lattice lines.
///
/// On the lattice line through x with direction z the unknowns are the
/// interior nodes of that line; every other node up to the kernel truncation
/// reads `exterior`, and the tail beyond it reads `far_field`. Exterior
/// contributions are summed once at construction.
class FractionalScheme final : public DirectionalScheme {
public:
    using ExteriorFn = std::function<double(const Point2d&)>;
    using FarFieldFn = std::function<std::optional<double>(const Point2d&, const Point2d&)>;

    FractionalScheme(const Domaind& domain, const GridFunctiond& grid, const DirectionSet& dirs,
                     const FracParamsd& params, const ExteriorFn& exterior, const FarFieldFn& far_field,
                     int workers = 1);

    FractionalScheme(const Domaind& domain, const GridFunctiond& grid, const DirectionSet& dirs,
                     const FracParamsd& params, const ExteriorDatumd& g, int workers = 1);

    int directions() const override { return static_cast<int>(lines_.size()); }
    const GridFunctiond& grid() const override { return grid_; }
    void evaluate(const Eigen::VectorXd& u, int d, Eigen::VectorXd& alpha, Eigen::VectorXd& op,
                  int workers) const override;

    const KernelWeights<double>& weights(int d) const { return weights_[static_cast<std::size_t>(d)]; }
    double total_weight(int d) const { return totals_[static_cast<std::size_t>(d)]; }

private:
    struct Line {
        std::vector<int> nodes;
    };

    GridFunctiond grid_;
    std::vector<KernelWeights<double>> weights_;
    std::vector<double> totals_;
    std::vector<std::vector<Line>> lines_;     // per direction
    std::vector<Eigen::VectorXd> exterior_;    // per direction, per grid node
};

/// Chord averaging along lattice lines for the classical envelope. Arms end
/// at the next lattice node, or at the boundary crossing (datum value there)
/// when the line leaves the domain first.
class ClassicalScheme final : public DirectionalScheme {
public:
    ClassicalScheme(const Domaind& domain, const ExteriorDatumd& g, const GridFunctiond& grid,
                    const DirectionSet& dirs);

    int directions() const override { return static_cast<int>(arms_.size()); }
    const GridFunctiond& grid() const override { return grid_; }
    void evaluate(const Eigen::VectorXd& u, int d, Eigen::VectorXd& alpha, Eigen::VectorXd& op,
                  int workers) const override;

private:
    struct Arm {
        int node = -1;     // neighbor node, or -1 when the arm ends on the boundary
        double value = 0;  // boundary datum value when node == -1
        double length = 0;
    };
    struct Arms {
        Arm forward;
        Arm backward;
    };

    GridFunctiond grid_;
    std::vector<std::vector<Arms>> arms_; // per direction, per grid node
};

/// Diagnostics of a grid function under a scheme: per-node minimal
/// directional operator, its argmin (first direction on ties), and summary.
ResidualReport residual_diagnostics(const Eigen::VectorXd& u, const DirectionalScheme& scheme, int workers = 1);

/// Monotone Jacobi iteration u <- min(u, min_d alpha_d(u)) started from
/// `start` at interior nodes; exterior nodes carry the datum.
EnvelopeResult solve_envelope(const DirectionalScheme& scheme, const ExteriorDatumd& g, double start,
                              const Tolerances& tol, int workers = 1);

/// s-convex envelope of g: fixed point of the min over directions of the
/// line-wise harmonic replacement, started from M = sup g.
EnvelopeResult fractional_envelope(const Domaind& domain, const ExteriorDatumd& g, const FracParamsd& params,
                                   const GridFunctiond& grid, const DirectionSet& dirs, int workers = 1);

/// Classical convex envelope of the boundary restriction of g.
EnvelopeResult classical_envelope(const Domaind& domain, const ExteriorDatumd& g, const GridFunctiond& grid,
                                  const DirectionSet& dirs, const Tolerances& tol, int workers = 1);

/// min sum lambda_i g_i over convex combinations of the samples equal to x,
/// by enumerating singletons, collinear pairs and triangles.
double hull_envelope_oracle(std::span<const Point2d> points, std::span<const double> values, const Point2d& x);

/// Throws InvalidArgument unless the grid has at least `min_nodes` interior
/// nodes across each axis of the domain (one axis for intervals).
void require_resolution(const Domaind& domain, const GridFunctiond& grid, int min_nodes = 8);

} // namespace fracenv
