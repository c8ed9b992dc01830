#include "liebm/pathspace.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace liebm {

TimeGrid::TimeGrid(double horizon_, int steps_) : horizon(horizon_), steps(steps_) {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw std::invalid_argument("time horizon must be positive");
    if (steps < 1) throw std::invalid_argument("grid needs at least one step");
}

void require_same_grid(const TimeGrid& a, const TimeGrid& b) {
    if (!(a == b)) {
        std::ostringstream os;
        os << "grid mismatch: (T=" << a.horizon << ", N=" << a.steps << ") vs (T=" << b.horizon
           << ", N=" << b.steps << ")";
        throw GridMismatchError(os.str());
    }
}

std::vector<AlgebraVector> AlgebraPath::increments() const {
    std::vector<AlgebraVector> out;
    out.reserve(grid.steps);
    for (int k = 0; k < grid.steps; ++k) out.push_back(increment(k));
    return out;
}

AlgebraPath AlgebraPath::from_increments(const TimeGrid& grid, const std::vector<AlgebraVector>& increments) {
    if (static_cast<int>(increments.size()) != grid.steps) throw GridMismatchError("increment count differs from grid");
    AlgebraPath p{grid, {}};
    p.values.reserve(grid.steps + 1);
    AlgebraVector acc = AlgebraVector::Zero(increments.empty() ? 0 : increments.front().size());
    p.values.push_back(acc);
    for (const auto& dw : increments) {
        acc += dw;
        p.values.push_back(acc);
    }
    return p;
}

StepFunction StepFunction::zero(const TimeGrid& grid, int dim) {
    return StepFunction{grid, std::vector<AlgebraVector>(grid.steps, AlgebraVector::Zero(dim))};
}

double StepFunction::l2_norm_sq() const {
    double s = 0.0;
    for (const auto& h : cells) s += h.squaredNorm();
    return s * grid.dt();
}

double StepFunction::l2_inner(const StepFunction& other) const {
    require_same_grid(grid, other.grid);
    double s = 0.0;
    for (size_t k = 0; k < cells.size(); ++k) s += cells[k].dot(other.cells[k]);
    return s * grid.dt();
}

AlgebraPath StepFunction::integrate() const {
    std::vector<AlgebraVector> inc;
    inc.reserve(cells.size());
    for (const auto& h : cells) inc.push_back(h * grid.dt());
    return AlgebraPath::from_increments(grid, inc);
}

CameronMartinPath::CameronMartinPath(LieGroup group, std::vector<double> partition,
                                     std::vector<AlgebraVector> generators, Orientation orientation)
    : group_(std::move(group)),
      partition_(std::move(partition)),
      generators_(std::move(generators)),
      orientation_(orientation) {
    if (partition_.size() < 2 || partition_.size() != generators_.size() + 1)
        throw std::invalid_argument("partition must have one more node than there are generators");
    if (partition_.front() != 0.0) throw std::invalid_argument("partition must start at 0");
    for (size_t i = 1; i < partition_.size(); ++i)
        if (!(partition_[i] > partition_[i - 1])) throw std::invalid_argument("partition must be strictly increasing");
    for (const auto& xi : generators_)
        if (xi.size() != group_.dim() || !xi.allFinite())
            throw std::invalid_argument("generator has wrong dimension or is not finite");

    nodes_.reserve(partition_.size());
    nodes_.push_back(group_.identity());
    for (int j = 0; j < segments(); ++j) {
        GroupElement step = group_.exp(-(partition_[j + 1] - partition_[j]) * generators_[j]);
        nodes_.push_back(orientation_ == Orientation::LeftFactor ? GroupElement(step * nodes_.back())
                                                                 : GroupElement(nodes_.back() * step));
    }
}

CameronMartinPath CameronMartinPath::identity(const LieGroup& group, double horizon) {
    return CameronMartinPath(group, {0.0, horizon}, {group.zero()});
}

int CameronMartinPath::segment_of(double t) const {
    auto it = std::upper_bound(partition_.begin(), partition_.end(), t);
    int j = static_cast<int>(it - partition_.begin()) - 1;
    return std::clamp(j, 0, segments() - 1);
}

GroupElement CameronMartinPath::eval(double t) const {
    if (t < 0.0 || t > horizon()) throw std::out_of_range("evaluation time outside [0, T]");
    if (t == 0.0) return group_.identity();
    int j = segment_of(t);
    GroupElement step = group_.exp(-(t - partition_[j]) * generators_[j]);
    return orientation_ == Orientation::LeftFactor ? GroupElement(step * nodes_[j]) : GroupElement(nodes_[j] * step);
}

GroupPath CameronMartinPath::sample(const TimeGrid& grid) const {
    if (std::abs(grid.horizon - horizon()) > 1e-12 * horizon()) throw GridMismatchError("grid horizon differs from path horizon");
    GroupPath p{grid, {}};
    p.values.reserve(grid.steps + 1);
    for (int k = 0; k <= grid.steps; ++k) p.values.push_back(eval(std::min(grid.node(k), horizon())));
    return p;
}

double CameronMartinPath::energy() const {
    double e = 0.0;
    for (int j = 0; j < segments(); ++j) e += generators_[j].squaredNorm() * (partition_[j + 1] - partition_[j]);
    return e;
}

AlgebraVector CameronMartinPath::right_derivative(int j) const {
    if (orientation_ == Orientation::LeftFactor) return -generators_[j];
    return -group_.adjoint(nodes_[j], generators_[j]);
}

AlgebraVector CameronMartinPath::left_derivative(int j) const {
    if (orientation_ == Orientation::RightFactor) return -generators_[j];
    return -group_.adjoint(nodes_[j].transpose(), generators_[j]);
}

std::pair<StepFunction, StepFunction> CameronMartinPath::log_derivatives(const TimeGrid& grid) const {
    StepFunction left{grid, {}}, right{grid, {}};
    left.cells.reserve(grid.steps);
    right.cells.reserve(grid.steps);
    std::vector<AlgebraVector> lseg, rseg;
    for (int j = 0; j < segments(); ++j) {
        lseg.push_back(left_derivative(j));
        rseg.push_back(right_derivative(j));
    }
    for (int k = 0; k < grid.steps; ++k) {
        int j = segment_of(0.5 * (grid.node(k) + grid.node(k + 1)));
        left.cells.push_back(lseg[j]);
        right.cells.push_back(rseg[j]);
    }
    return {std::move(left), std::move(right)};
}

bool CameronMartinPath::refined_by(const TimeGrid& grid) const {
    for (double t : partition_) {
        double k = t / grid.dt();
        if (std::abs(k - std::round(k)) > 1e-9) return false;
    }
    return true;
}

CameronMartinPath CameronMartinPath::inverse() const {
    std::vector<AlgebraVector> gens;
    for (const auto& xi : generators_) gens.push_back(-xi);
    return CameronMartinPath(group_, partition_, std::move(gens),
                             orientation_ == Orientation::LeftFactor ? Orientation::RightFactor
                                                                     : Orientation::LeftFactor);
}

CameronMartinPath CameronMartinPath::scaled(const std::vector<double>& factors) const {
    if (static_cast<int>(factors.size()) != segments()) throw std::invalid_argument("one factor per segment required");
    std::vector<AlgebraVector> gens;
    for (int j = 0; j < segments(); ++j) gens.push_back(factors[j] * generators_[j]);
    return CameronMartinPath(group_, partition_, std::move(gens), orientation_);
}

CameronMartinPath CameronMartinPath::refined_at(double t) const {
    if (!(t > 0.0 && t < horizon())) throw std::out_of_range("split point must be interior");
    int j = segment_of(t);
    if (t == partition_[j]) return *this;
    std::vector<double> part = partition_;
    std::vector<AlgebraVector> gens = generators_;
    part.insert(part.begin() + j + 1, t);
    gens.insert(gens.begin() + j + 1, generators_[j]);
    return CameronMartinPath(group_, std::move(part), std::move(gens), orientation_);
}

GroupPath path_multiply(const GroupPath& a, const GroupPath& b) {
    require_same_grid(a.grid, b.grid);
    GroupPath out{a.grid, {}};
    out.values.reserve(a.values.size());
    for (size_t k = 0; k < a.values.size(); ++k) out.values.push_back(a.values[k] * b.values[k]);
    return out;
}

GroupPath path_invert(const GroupPath& a) {
    GroupPath out{a.grid, {}};
    out.values.reserve(a.values.size());
    // Orthogonal groups: the inverse is the transpose, which is an exact involution.
    for (const auto& g : a.values) out.values.push_back(g.transpose());
    return out;
}

GroupPath identity_path(const LieGroup& group, const TimeGrid& grid) {
    return GroupPath{grid, std::vector<GroupElement>(grid.steps + 1, group.identity())};
}

StepFunction grid_left_log_derivative(const LieGroup& group, const GroupPath& path) {
    StepFunction h{path.grid, {}};
    for (int k = 0; k < path.grid.steps; ++k)
        h.cells.push_back(group.log(path.values[k].transpose() * path.values[k + 1]) / path.grid.dt());
    return h;
}

StepFunction grid_right_log_derivative(const LieGroup& group, const GroupPath& path) {
    StepFunction h{path.grid, {}};
    for (int k = 0; k < path.grid.steps; ++k)
        h.cells.push_back(group.log(path.values[k + 1] * path.values[k].transpose()) / path.grid.dt());
    return h;
}

double discrete_energy(const LieGroup& group, const GroupPath& path) {
    double e = 0.0;
    for (int k = 0; k < path.grid.steps; ++k)
        e += group.log(path.values[k].transpose() * path.values[k + 1]).squaredNorm();
    return e / path.grid.dt();
}

}  // namespace liebm
