#include "liebm/flow.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace liebm {

std::mt19937_64 NoiseStream::engine() const {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    return std::mt19937_64(seq);
}

AlgebraPath sample_bm(const LieGroup& group, const TimeGrid& grid, const NoiseStream& noise) {
    return sample_bm_nested(group, grid, grid.steps, noise);
}

AlgebraPath sample_bm_nested(const LieGroup& group, const TimeGrid& grid, int fine_steps, const NoiseStream& noise) {
    if (fine_steps < grid.steps || fine_steps % grid.steps != 0)
        throw GridMismatchError("grid steps must divide the fine step count");
    const int d = group.dim();
    const int block = fine_steps / grid.steps;
    const double scale = std::sqrt(grid.horizon / fine_steps);
    auto rng = noise.engine();
    std::normal_distribution<double> normal;

    AlgebraPath w{grid, {}};
    w.values.reserve(grid.steps + 1);
    AlgebraVector acc = AlgebraVector::Zero(d);
    w.values.push_back(acc);
    for (int k = 0; k < grid.steps; ++k) {
        for (int b = 0; b < block; ++b)
            for (int i = 0; i < d; ++i) acc[i] += scale * normal(rng);
        w.values.push_back(acc);
    }
    return w;
}

GroupPath develop_left(const LieGroup& group, const AlgebraPath& w) {
    GroupPath g{w.grid, {}};
    g.values.reserve(w.values.size());
    g.values.push_back(group.identity());
    for (int k = 0; k < w.grid.steps; ++k) g.values.push_back(g.values.back() * group.exp(w.increment(k)));
    return g;
}

GroupPath develop_right(const LieGroup& group, const AlgebraPath& w) {
    GroupPath g{w.grid, {}};
    g.values.reserve(w.values.size());
    g.values.push_back(group.identity());
    for (int k = 0; k < w.grid.steps; ++k) g.values.push_back(group.exp(w.increment(k)) * g.values.back());
    return g;
}

namespace {

template <typename Ratio>
AlgebraPath ito_map(const LieGroup& group, const GroupPath& g, Ratio ratio) {
    std::vector<AlgebraVector> inc;
    inc.reserve(g.grid.steps);
    for (int k = 0; k < g.grid.steps; ++k) {
        try {
            inc.push_back(group.log(ratio(g.values[k], g.values[k + 1])));
        } catch (const CutLocusError& e) {
            throw CutLocusError(e.angle(), k);
        }
    }
    return AlgebraPath::from_increments(g.grid, inc);
}

}  // namespace

AlgebraPath ito_left(const LieGroup& group, const GroupPath& g) {
    return ito_map(group, g, [](const GroupElement& a, const GroupElement& b) { return GroupElement(a.transpose() * b); });
}

AlgebraPath ito_right(const LieGroup& group, const GroupPath& g) {
    return ito_map(group, g, [](const GroupElement& a, const GroupElement& b) { return GroupElement(b * a.transpose()); });
}

double stoch_integral(const StepFunction& h, const AlgebraPath& w) {
    require_same_grid(h.grid, w.grid);
    // Neumaier summation
    double sum = 0.0, comp = 0.0;
    for (int k = 0; k < w.grid.steps; ++k) {
        double term = h.cells[k].dot(w.increment(k));
        double t = sum + term;
        comp += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
        sum = t;
    }
    return sum + comp;
}

AlgebraPath rotate_path(const CameronMartinPath& phi, const AlgebraPath& w) {
    return rotate_path(phi.group(), phi.sample(w.grid), w);
}

AlgebraPath rotate_path(const LieGroup& group, const GroupPath& phi, const AlgebraPath& w) {
    require_same_grid(phi.grid, w.grid);
    std::vector<AlgebraVector> inc;
    inc.reserve(w.grid.steps);
    for (int k = 0; k < w.grid.steps; ++k) inc.push_back(group.adjoint(phi.values[k], w.increment(k)));
    return AlgebraPath::from_increments(w.grid, inc);
}

AdMatrix quadratic_variation(const AlgebraPath& w) {
    const int d = static_cast<int>(w.values.front().size());
    AdMatrix qv = AdMatrix::Zero(d, d);
    for (int k = 0; k < w.grid.steps; ++k) {
        AlgebraVector dw = w.increment(k);
        qv += dw * dw.transpose();
    }
    return qv;
}

double max_distance(const AlgebraPath& a, const AlgebraPath& b) {
    require_same_grid(a.grid, b.grid);
    double worst = 0.0;
    for (size_t k = 0; k < a.values.size(); ++k) worst = std::max(worst, (a.values[k] - b.values[k]).norm());
    return worst;
}

double right_translation_defect(const LieGroup& group, const GroupPath& g, const CameronMartinPath& phi) {
    GroupPath phis = phi.sample(g.grid);
    AlgebraPath lhs = ito_left(group, path_multiply(g, phis));
    AlgebraPath bl = ito_left(group, g);
    auto [left, right] = phi.log_derivatives(g.grid);
    std::vector<AlgebraVector> inc;
    for (int k = 0; k < g.grid.steps; ++k)
        inc.push_back(group.adjoint(phis.values[k].transpose(), bl.increment(k)) + left.cells[k] * g.grid.dt());
    return max_distance(lhs, AlgebraPath::from_increments(g.grid, inc));
}

double adjoint_relation_defect(const LieGroup& group, const GroupPath& g) {
    AlgebraPath bl = ito_left(group, g);
    AlgebraPath br = ito_right(group, g);
    double worst = 0.0;
    for (int k = 0; k < g.grid.steps; ++k)
        worst = std::max(worst, (br.increment(k) - group.adjoint(g.values[k], bl.increment(k))).norm());
    return worst;
}

bool MartingaleReport::pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const MartingaleCheck& c) { return c.pass; });
}

MartingaleReport martingale_defect(const LieGroup& group, const TimeGrid& grid,
                                   const std::vector<std::pair<int, int>>& checkpoints, std::uint64_t paths,
                                   std::uint64_t seed, bool compensated, const RunOptions& options) {
    const int n = group.matrix_size();
    const int n2 = n * n;
    const int per_cp = n2 * (1 + n2);
    for (auto [s, t] : checkpoints)
        if (s < 0 || t > grid.steps || s >= t) throw std::invalid_argument("checkpoints must satisfy 0 <= s < t <= N");
    const Mat c2 = group.casimir();
    const double dt = grid.dt();

    auto task = [&](std::uint64_t index, std::span<double> out) {
        GroupPath g = develop_left(group, sample_bm(group, grid, NoiseStream{seed, index}));
        size_t col = 0;
        for (auto [s, t] : checkpoints) {
            Mat drift = Mat::Zero(n, n);
            if (compensated)
                for (int k = s; k < t; ++k) drift += g.values[k] * c2;
            Mat incr = g.values[t] - g.values[s] - 0.5 * dt * drift;
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) {
                    double m = incr(a, b);
                    out[col++] = m;
                    for (int i = 0; i < n; ++i)
                        for (int j = 0; j < n; ++j) out[col++] = m * g.values[s](i, j);
                }
        }
    };
    EnsembleResult res = run_ensemble(checkpoints.size() * per_cp, task, paths, options);

    MartingaleReport rep;
    rep.compensated = compensated;
    double c_op = c2.jacobiSvd().singularValues()(0);
    size_t col = 0;
    for (auto [s, t] : checkpoints) {
        double allowance = 0.5 * c_op * c_op * dt * (t - s) * dt;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int f = 0; f <= n2; ++f) {
                    MartingaleCheck c;
                    c.s = grid.node(s);
                    c.t = grid.node(t);
                    c.row = a;
                    c.col = b;
                    c.test_function = f == 0 ? "1" : "g_s[" + std::to_string((f - 1) / n) + std::to_string((f - 1) % n) + "]";
                    c.estimate = res.mean(col);
                    c.std_error = res.std_error(col);
                    c.bias_allowance = allowance;
                    if (c.std_error > 0) rep.worst_sigma = std::max(rep.worst_sigma, std::abs(c.estimate) / c.std_error);
                    rep.checks.push_back(c);
                    ++col;
                }
    }
    rep.sigma_threshold = family_sigma_threshold(rep.checks.size());
    for (auto& c : rep.checks) c.pass = std::abs(c.estimate) <= rep.sigma_threshold * c.std_error + c.bias_allowance;
    return rep;
}

double family_sigma_threshold(size_t checks) {
    // Two-sided family-wise error equal to that of a single 3-sigma test.
    constexpr double kSingle = 0.0026997960632601866;
    if (checks <= 1) return 3.0;
    double per_check = 1.0 - std::pow(1.0 - kSingle, 1.0 / static_cast<double>(checks));
    boost::math::normal_distribution<double> nd;
    return boost::math::quantile(boost::math::complement(nd, per_check / 2.0));
}

}  // namespace liebm
