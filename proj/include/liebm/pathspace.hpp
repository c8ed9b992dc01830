#pragma once

// Discretized path spaces W(G), W(g) on a uniform grid, and the
// piecewise-exponential class of finite-energy paths.

#include "liebm/lie.hpp"

#include <stdexcept>
#include <utility>
#include <vector>

namespace liebm {

class GridMismatchError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct TimeGrid {
    double horizon = 1.0;
    int steps = 1;

    TimeGrid() = default;
    TimeGrid(double horizon, int steps);

    double dt() const { return horizon / steps; }
    double node(int k) const { return k == steps ? horizon : horizon * k / steps; }
    bool operator==(const TimeGrid& other) const = default;
};

void require_same_grid(const TimeGrid& a, const TimeGrid& b);

/// Path in the algebra: values w_0 = 0, w_1, ..., w_N in basis coordinates.
struct AlgebraPath {
    TimeGrid grid;
    std::vector<AlgebraVector> values;

    AlgebraVector increment(int k) const { return values[k + 1] - values[k]; }
    std::vector<AlgebraVector> increments() const;
    static AlgebraPath from_increments(const TimeGrid& grid, const std::vector<AlgebraVector>& increments);
};

/// Path in the group: values g_0 = e, g_1, ..., g_N.
struct GroupPath {
    TimeGrid grid;
    std::vector<GroupElement> values;
};

/// Piecewise constant algebra-valued function on grid cells.
struct StepFunction {
    TimeGrid grid;
    std::vector<AlgebraVector> cells;

    static StepFunction zero(const TimeGrid& grid, int dim);
    /// sum |h_k|^2 dt
    double l2_norm_sq() const;
    /// sum <h_k, k_k> dt
    double l2_inner(const StepFunction& other) const;
    /// Path t -> int_0^t h ds sampled at the nodes.
    AlgebraPath integrate() const;
};

/// Which side the segment exponentials multiply from.
///   LeftFactor:  phi(s) = exp(-(s - t_{j-1}) xi_j) phi(t_{j-1})
///   RightFactor: phi(s) = phi(t_{j-1}) exp(-(s - t_{j-1}) xi_j)
enum class Orientation { LeftFactor, RightFactor };

/// Finite-energy group path built from constant-generator segments.
class CameronMartinPath {
public:
    CameronMartinPath(LieGroup group, std::vector<double> partition, std::vector<AlgebraVector> generators,
                      Orientation orientation = Orientation::LeftFactor);

    /// Identity path on [0, T] with a single zero segment.
    static CameronMartinPath identity(const LieGroup& group, double horizon);

    const LieGroup& group() const { return group_; }
    const std::vector<double>& partition() const { return partition_; }
    const std::vector<AlgebraVector>& generators() const { return generators_; }
    Orientation orientation() const { return orientation_; }
    double horizon() const { return partition_.back(); }
    int segments() const { return static_cast<int>(generators_.size()); }

    GroupElement eval(double t) const;
    GroupPath sample(const TimeGrid& grid) const;
    /// sum |xi_j|^2 (t_j - t_{j-1})
    double energy() const;

    /// Index of the segment owning [t, t + eps).
    int segment_of(double t) const;
    /// phi' phi^{-1} on segment j (constant).
    AlgebraVector right_derivative(int segment) const;
    /// phi^{-1} phi' on segment j (constant).
    AlgebraVector left_derivative(int segment) const;

    /// Step functions (left a_k ~ phi^{-1} phi', right b_k ~ phi' phi^{-1}).
    /// Each grid cell takes the value of the segment that owns its midpoint.
    std::pair<StepFunction, StepFunction> log_derivatives(const TimeGrid& grid) const;

    /// True when every partition node is a grid node.
    bool refined_by(const TimeGrid& grid) const;

    /// Pointwise inverse s -> phi(s)^{-1}; stays in the class with flipped orientation.
    CameronMartinPath inverse() const;
    /// Generators scaled per segment: the family phi_x with xi_j -> x_j xi_j.
    CameronMartinPath scaled(const std::vector<double>& factors) const;
    /// Same path on a partition where segment j is split at `t`.
    CameronMartinPath refined_at(double t) const;

private:
    LieGroup group_;
    std::vector<double> partition_;
    std::vector<AlgebraVector> generators_;
    Orientation orientation_;
    std::vector<GroupElement> nodes_;
};

GroupPath path_multiply(const GroupPath& a, const GroupPath& b);
GroupPath path_invert(const GroupPath& a);
GroupPath identity_path(const LieGroup& group, const TimeGrid& grid);

/// (1/dt) log(g_k^{-1} g_{k+1}) per cell.
StepFunction grid_left_log_derivative(const LieGroup& group, const GroupPath& path);
/// (1/dt) log(g_{k+1} g_k^{-1}) per cell.
StepFunction grid_right_log_derivative(const LieGroup& group, const GroupPath& path);
/// sum |log(g_k^{-1} g_{k+1})|^2 / dt
double discrete_energy(const LieGroup& group, const GroupPath& path);

}  // namespace liebm
