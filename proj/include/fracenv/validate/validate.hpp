#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fracenv/core/datum.hpp"
#include "fracenv/core/directions.hpp"
#include "fracenv/core/domain.hpp"
#include "fracenv/core/grid.hpp"
#include "fracenv/core/params.hpp"
#include "fracenv/envelope/envelope.hpp"

namespace fracenv {

/// A chord of the domain sampled at `nodes` + 1 equally spaced points,
/// endpoints included. Lattice-aligned segments join two grid nodes on a
/// common lattice line and are sampled at every lattice point between them.
struct Segment {
    Point2d from;
    Point2d to;
    int nodes = 2;
};

/// Random chords with both endpoints interior grid nodes on a common lattice
/// line of `dirs`, at least two lattice steps long.
std::vector<Segment> lattice_segments(const Domaind& domain, const GridFunctiond& grid, const DirectionSet& dirs,
                                      int count, std::uint64_t seed);

/// Random chords with endpoints uniform in the domain (rejection sampled),
/// sampled at spacing close to the grid spacing.
std::vector<Segment> random_segments(const Domaind& domain, const GridFunctiond& grid, int count,
                                     std::uint64_t seed);

struct SegmentCheck {
    int index = 0;
    Segment segment;
    double worst = 0.0;   ///< max over interior samples of u - v
    double worst_t = 0.0; ///< parameter in (0, 1) where it occurs
};

struct ConvexityReport {
    std::vector<SegmentCheck> segments; ///< sorted by index
    double max_violation = 0.0;
    int worst_segment = -1;
    double tol = 0.0;

    bool passed() const { return max_violation <= tol; }
};

/// Along each segment, compares u with the solution v of the line Dirichlet
/// problem whose exterior is the trace of u^g on the full line: u inside the
/// domain (bilinear between nodes), g outside. Reports max(u - v) per segment.
ConvexityReport s_convexity_check(const GridFunctiond& u, const Domaind& domain, const ExteriorDatumd& g,
                                  const FracParamsd& params, std::span<const Segment> segments, double tol,
                                  int workers = 1);

enum class BarrierKind { Upper, Lower };

/// Parameters of a barrier anchored at a boundary point.
///
/// Upper: line exterior g(x0) + eta/3 on the collar (-theta, 0] in front of x0
/// and `cap` everywhere else outside the chord (0, |xhat - x0|).
/// Lower: in coordinates moved so x0 is the origin with inward normal e1,
/// g(x0) - eta/2 - slope y1 + epsilon |y|^2 on the domain and the exterior
/// strip of width `strip`, min g beyond.
struct BarrierSpec {
    BarrierKind kind = BarrierKind::Upper;
    Point2d x0{0, 0};
    Point2d xhat{0, 0};
    double theta = 0.0;
    double eta = 0.0;
    double cap = 0.0;
    double slope = 0.0;
    double epsilon = 0.0;
    double strip = 0.0;

    static BarrierSpec upper(const Point2d& x0, const Point2d& xhat, double theta, double eta, double cap);
    static BarrierSpec lower(const Point2d& x0, double slope, double epsilon, double strip, double eta);

    /// Throws InvalidArgument when the fields are inconsistent with the domain.
    void check(const Domaind& domain) const;
};

/// Largest collar theta <= theta_max such that g(x0 + t z) <= g(x0) + eta/3
/// for t in (-theta, 0], z the unit vector from x0 towards xhat.
double calibrate_collar(const Domaind& domain, const ExteriorDatumd& g, const Point2d& x0, const Point2d& xhat,
                        double eta, double theta_max);

/// Upper barrier on the lattice line of direction `dir` through the interior
/// node `node`: x0 is where the line leaves the domain going backwards, xhat
/// is the node, the collar is calibrated.
BarrierSpec lattice_upper_barrier(const Domaind& domain, const ExteriorDatumd& g, const GridFunctiond& grid,
                                  int node, const LatticeDirection& dir, double eta, double theta_max);

/// `count` upper barriers anchored at equally spaced boundary angles. Each
/// chord runs along the lattice direction closest to the inward normal; xhat
/// is the grid node nearest to the anchor moved `reach` along it, and x0 is
/// recomputed as the exit point of that node's lattice line.
std::vector<BarrierSpec> boundary_anchored_barriers(const Domaind& domain, const ExteriorDatumd& g,
                                                    const GridFunctiond& grid, const DirectionSet& dirs, int count,
                                                    double eta, double reach);

struct UpperBarrierReport {
    BarrierSpec spec;
    double s = 0.0;
    int nodes = 0;
    Eigen::VectorXd t;          ///< chord parameters of the samples
    Eigen::VectorXd barrier;    ///< w_s at the samples
    Eigen::VectorXd envelope;   ///< u_s at the samples
    double max_violation = 0.0; ///< max(u_s - w_s)
    double worst_t = 0.0;
    double affine_distance = 0.0; ///< sup |w_s - limit line|
    double radius = 0.0;          ///< largest t with u_s <= g(x0) + eta on (0, t]
    double tol = 0.0;

    bool passed() const { return max_violation <= tol; }
};

/// Solves the one-dimensional barrier on the chord x0 -> xhat and compares
/// u_s with it. Chords parallel to a lattice vector are sampled at lattice
/// points; other chords at spacing close to h with bilinear interpolation.
UpperBarrierReport barrier_upper_check(const EnvelopeResult& u_s, const Domaind& domain, const BarrierSpec& spec,
                                       const ExteriorDatumd& g, const FracParamsd& params, double tol);

/// Line through t = 0 and (L, cap) with intercept g(x0) + eta/3: the s -> 1
/// limit of the upper barrier.
double upper_barrier_limit(const BarrierSpec& spec, double gx0, double t);

/// The lower barrier as a function on the plane.
class LowerBarrier {
public:
    LowerBarrier(const Domaind& domain, const ExteriorDatumd& g, const BarrierSpec& spec);

    double operator()(const Point2d& x) const;
    /// u1 + epsilon |y|^2 without the cut to min g.
    double smooth(const Point2d& x) const;
    bool in_support(const Point2d& x) const; ///< domain or exterior strip
    Point2d normalized(const Point2d& x) const;
    double floor() const noexcept { return floor_; }
    const BarrierSpec& spec() const noexcept { return spec_; }

private:
    Domaind domain_;
    BarrierSpec spec_;
    double gx0_ = 0.0;
    double floor_ = 0.0;
    Point2d inward_{1, 0};
};

struct LowerBarrierReport {
    BarrierSpec spec;
    double s = 0.0;
    // (a) barrier below the datum on the strip
    double strip_margin = 0.0; ///< max over strip samples of barrier - g (must be < 0)
    Point2d strip_witness{0, 0};
    // (b) strict discrete convexity
    double min_operator = 0.0;
    int operator_node = -1;
    int operator_direction = -1;
    // (c) envelope above the barrier
    double max_excess = 0.0; ///< max over interior nodes of barrier - u_s
    int excess_node = -1;
    double tol = 0.0;

    bool strip_ok() const { return strip_margin < 0.0; }
    bool convex_ok() const { return min_operator > 0.0; }
    bool below_ok() const { return max_excess <= tol; }
    bool passed() const { return strip_ok() && convex_ok() && below_ok(); }
};

/// Max of barrier - g over a dense sample of the strip (boundary included)
/// and over the exterior lattice nodes of `grid` inside it.
double lower_barrier_strip_margin(const LowerBarrier& b, const Domaind& domain, const ExteriorDatumd& g,
                                  const GridFunctiond* grid, Point2d* witness = nullptr);

/// Checks (a) the strip condition, (b) positivity of every discrete
/// directional operator of the barrier and (c) u_s >= barrier - tol.
LowerBarrierReport barrier_lower_check(const EnvelopeResult& u_s, const Domaind& domain, const BarrierSpec& spec,
                                       const ExteriorDatumd& g, const FracParamsd& params, const DirectionSet& dirs,
                                       double tol, int workers = 1);

/// Min over interior nodes and directions of the discrete directional
/// operator of the barrier, with the node and direction attaining it.
struct BarrierOperatorMin {
    double value = 0.0;
    int node = -1;
    int direction = -1;
};

BarrierOperatorMin lower_barrier_operator(const LowerBarrier& b, const Domaind& domain, const GridFunctiond& grid,
                                          const DirectionSet& dirs, const FracParamsd& params, int workers = 1);

/// Strip width for a given slope: halves `strip_max` until the strip
/// condition holds, then bisects between the last failing and first passing
/// widths. Returns 0 when no width works.
double calibrate_strip(const Domaind& domain, const ExteriorDatumd& g, const GridFunctiond& grid,
                       const Point2d& x0, double eta, double slope, double epsilon, double strip_max);

/// Searches slopes slope_max 2^-j, each with its calibrated strip, for the
/// first one whose discrete operator is positive for every order in
/// `orders`, then bisects towards the largest such slope. Throws Error when
/// nothing is found.
BarrierSpec calibrate_lower_barrier(const Domaind& domain, const ExteriorDatumd& g, const GridFunctiond& grid,
                                    const DirectionSet& dirs, std::span<const FracParamsd> orders,
                                    const Point2d& x0, double eta, double slope_max, double epsilon,
                                    double strip_max, int workers = 1);

struct NodeViolation {
    int node = -1;
    double value = 0.0;
    double bound = 0.0;
};

struct BoundsReport {
    double lower = 0.0; ///< m - tol
    double upper = 0.0; ///< M + tol
    std::vector<NodeViolation> bound_violations;
    double boundary_threshold = 0.0; ///< C_b (h + omega_g(h))
    double modulus = 0.0;            ///< sampled omega_g(h)
    double max_boundary_deviation = 0.0;
    int boundary_nodes = 0;
    std::vector<NodeViolation> boundary_violations;

    bool passed() const { return bound_violations.empty() && boundary_violations.empty(); }
};

/// Sampled modulus of continuity of g at scale `r` near the boundary.
double datum_modulus(const Domaind& domain, const ExteriorDatumd& g, double r, int samples = 4096);

/// m - tol <= u_s <= M + tol at interior nodes, and |u_s(x) - g(pi(x))| <=
/// C_b (h + omega_g(h)) at interior nodes within one cell of the boundary.
BoundsReport bounds_and_boundary_check(const EnvelopeResult& u_s, const ExteriorDatumd& g, const Domaind& domain,
                                       double tol, double boundary_constant);

} // namespace fracenv
